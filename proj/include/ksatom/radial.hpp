#pragma once

// Radial discretisation: logarithmic grids, reduced radial functions
// u(r) = r * R(r) per (l, m) channel, the multipole Poisson solver and the
// per-channel finite-difference Hamiltonian.
//
// The channel operator -d^2/dr^2 + l(l+1)/r^2 + U(r) is discretised in
// x = ln r with w = u / sqrt(r):
//
//   -w'' + (l + 1/2)^2 w + r^2 U w = eps r^2 w,
//
// i.e. a symmetric tridiagonal pencil (A, diag(r^2)). The centrifugal
// coefficient is replaced by (2 cosh((l+1/2)h) - 2)/h^2 so that the regular
// solution r^{l+1/2} of the free equation is reproduced exactly; the left
// ghost point follows r^{l+1/2}(1 + a r) with the Coulomb slope a taken from
// r U at the first point, and the right end is Dirichlet.

#include <Eigen/Dense>
#include <cstddef>
#include <span>
#include <vector>

#include "ksatom/angular.hpp"
#include "ksatom/tridiagonal.hpp"

namespace ksatom {

class RadialGrid {
 public:
  RadialGrid() = default;
  /// Throws ConfigError unless 0 < r_min < r_max and points >= 64.
  RadialGrid(std::size_t points, double r_min, double r_max);

  std::size_t size() const { return r_.size(); }
  double r(std::size_t i) const { return r_[i]; }
  std::span<const double> radii() const { return r_; }
  /// Quadrature weights for int_0^inf g(r) dr (h * r_i).
  std::span<const double> weights() const { return w_; }
  double log_step() const { return h_; }
  double r_min() const { return r_.front(); }
  double r_max() const { return r_.back(); }

  double integrate(std::span<const double> g) const;
  double inner(std::span<const double> a, std::span<const double> b) const;
  /// Same grid with the log step halved `times` times.
  RadialGrid refined(int times) const;

  friend bool operator==(const RadialGrid& a, const RadialGrid& b) {
    return a.r_.size() == b.r_.size() && a.r_min() == b.r_min() && a.r_max() == b.r_max();
  }

 private:
  std::vector<double> r_;
  std::vector<double> w_;
  double h_ = 0.0;
};

RadialGrid make_grid(std::size_t points, double r_min, double r_max);

/// One orbital restricted to a single angular channel:
/// phi(x) = u(r)/r * Y_lm(x/|x|).
struct Orbital {
  Channel channel;
  std::vector<double> u;
};

class OrbitalSet {
 public:
  OrbitalSet() = default;
  OrbitalSet(RadialGrid grid, std::vector<Orbital> orbitals);

  const RadialGrid& grid() const { return grid_; }
  std::size_t size() const { return orbitals_.size(); }
  const Orbital& operator[](std::size_t i) const { return orbitals_[i]; }
  Orbital& operator[](std::size_t i) { return orbitals_[i]; }
  const std::vector<Orbital>& orbitals() const { return orbitals_; }

  /// (phi_i, phi_j); zero across different channels.
  Eigen::MatrixXd overlap() const;
  double orthonormality_error() const;

 private:
  RadialGrid grid_;
  std::vector<Orbital> orbitals_;
};

/// Y^lambda[f](r) = int f(t) r_<^lambda / r_>^(lambda+1) dt by cumulative
/// quadrature with the grid weights. The kernel is symmetric, so the induced
/// exchange operator is exactly self-adjoint on the grid.
std::vector<double> multipole_potential(const RadialGrid& grid, std::span<const double> f, int lambda);

/// int r^lambda f(r) dr: the far-field coefficient of multipole_potential.
double multipole_moment(const RadialGrid& grid, std::span<const double> f, int lambda);

/// Coulomb potential of the pair density phi_a phi_b, as radial multipole
/// components: components[lambda] = Y^lambda[u_a u_b] (empty when the
/// angular coupling forbids lambda). The 3D potential is
///   sum_{lambda mu} 4pi/(2 lambda+1) <Y_a Y_b Y_lambda mu> Y^lambda(r) Y_lambda mu.
struct PairPotential {
  Channel a;
  Channel b;
  std::vector<std::vector<double>> components;

  bool has(int lambda) const {
    return lambda >= 0 && static_cast<std::size_t>(lambda) < components.size() &&
           !components[lambda].empty();
  }
};

PairPotential poisson_multipole(const Orbital& source_a, const Orbital& source_b, const RadialGrid& grid,
                                const AngularCoupling& angular);

/// Relative l2 residual of the discrete radial Poisson equation
/// w'' - (lambda+1/2)^2 w = -(2 lambda+1) sqrt(r) f with w = sqrt(r) Y,
/// using 4th-order stencils on interior points.
double poisson_residual(const RadialGrid& grid, std::span<const double> potential, std::span<const double> f,
                        int lambda);

/// Pencil of the channel operator -d^2/dr^2 + l(l+1)/r^2 + U on the grid.
TridiagonalPencil channel_pencil(const RadialGrid& grid, int l, std::span<const double> potential);

/// Conversions between u and w = u / sqrt(r).
std::vector<double> to_pencil_space(const RadialGrid& grid, std::span<const double> u);
std::vector<double> from_pencil_space(const RadialGrid& grid, std::span<const double> w);

struct RadialEigenpair {
  double energy;
  std::vector<double> u;
};

/// Lowest `count` eigenpairs of -d^2/dr^2 + l(l+1)/r^2 + U, ascending, with
/// int u^2 dr = 1 and u > 0 near the origin.
std::vector<RadialEigenpair> eigensolve_radial(std::span<const double> potential, int l, std::size_t count,
                                               const RadialGrid& grid);

/// (-d^2/dr^2 + l(l+1)/r^2 + U) u with the solver's 2nd-order stencil.
std::vector<double> apply_channel_hamiltonian(std::span<const double> u, int l, std::span<const double> potential,
                                              const RadialGrid& grid);

/// Same operator with 4th-order stencils; used to measure discretisation
/// residuals of solutions produced with the 2nd-order scheme.
std::vector<double> apply_channel_hamiltonian_accurate(std::span<const double> u, int l,
                                                       std::span<const double> potential, const RadialGrid& grid);

/// -Z/r on the grid.
std::vector<double> nuclear_potential(const RadialGrid& grid, double charge);

}  // namespace ksatom
