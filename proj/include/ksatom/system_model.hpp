#pragma once

// Physical system, configuration expansions, densities and the reduced
// coefficients of the multiconfiguration equations.
//
// Units: H = sum_i (-Delta_i + V(x_i)) + sum_{i<j} 1/|x_i - x_j|, so a
// hydrogen-like level is -Z^2/(4 n^2). One electron per orbital (no spin).

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "ksatom/angular.hpp"
#include "ksatom/ks_transform.hpp"
#include "ksatom/radial.hpp"

namespace ksatom {

struct Nucleus {
  SpatialPoint position;
  double charge = 1.0;
};

class NuclearFrame {
 public:
  NuclearFrame() = default;
  /// Throws ConfigError for an empty list, Z <= 0 or coincident nuclei.
  explicit NuclearFrame(std::vector<Nucleus> nuclei);

  std::size_t size() const { return nuclei_.size(); }
  const Nucleus& operator[](std::size_t k) const { return nuclei_[k]; }
  const std::vector<Nucleus>& nuclei() const { return nuclei_; }
  double total_charge() const;
  /// Distance from nucleus k to the closest other nucleus (infinity for atoms).
  double nearest_distance(std::size_t k) const;
  /// True for a single nucleus at the origin, the case the radial solvers handle.
  bool is_atom_at_origin() const;

 private:
  std::vector<Nucleus> nuclei_;
};

/// V(x) = -sum_k Z_k / |x - R_k|. Throws SingularityError at a nucleus.
double coulomb_potential(const SpatialPoint& x, const NuclearFrame& frame);

struct ElectronicModel {
  ElectronicModel() = default;
  /// Throws ConfigError unless M >= N >= 1.
  ElectronicModel(int electrons, int orbitals, NuclearFrame frame);

  int electrons = 1;
  int orbitals = 1;
  NuclearFrame frame;

  double total_charge() const { return frame.total_charge(); }
};

/// All N-subsets of {0..M-1} in lexicographic order, with real coefficients.
class ConfigurationSet {
 public:
  ConfigurationSet() = default;
  /// Coefficients default to the first configuration {0..N-1}.
  ConfigurationSet(int electrons, int orbitals);
  /// Throws ConsistencyError when the length is wrong or sum c^2 != 1 (1e-12).
  ConfigurationSet(int electrons, int orbitals, std::vector<double> coefficients);

  int electrons() const { return n_; }
  int orbitals() const { return m_; }
  std::size_t size() const { return configs_.size(); }
  const std::vector<std::vector<int>>& configs() const { return configs_; }
  const std::vector<int>& config(std::size_t i) const { return configs_[i]; }
  const std::vector<double>& coefficients() const { return c_; }
  double coefficient(std::size_t i) const { return c_[i]; }
  void set_coefficients(std::vector<double> c);
  /// Bit mask of the orbitals in configuration i.
  unsigned mask(std::size_t i) const;

 private:
  int n_ = 0;
  int m_ = 0;
  std::vector<std::vector<int>> configs_;
  std::vector<double> c_;
};

/// n_j = sum_{I containing j} c_I^2
std::vector<double> occupations(const ConfigurationSet& cs);

struct Density {
  /// Spherical average of rho on the orbital grid.
  RadialProfile rho;
  std::vector<double> occupations;
};

/// rho = sum_j n_j |phi_j|^2, spherically averaged: rho(r) = sum_j n_j u_j^2 / (4 pi r^2).
Density density(const OrbitalSet& orbitals, const ConfigurationSet& cs);
/// Same with explicit occupations.
Density density(const OrbitalSet& orbitals, const std::vector<double>& occupations);

/// One- and two-electron integrals over the orbitals of an OrbitalSet:
///   h_ij = int u_i (-d^2/dr^2 + l(l+1)/r^2 - Z/r) u_j dr   (same channel)
///   (ij|kl) = sum_lambda C^lambda(ij;kl) int u_i u_j Y^lambda[u_k u_l] dr
/// The pair potentials Y^lambda[u_k u_l] are kept for reuse.
class IntegralTable {
 public:
  IntegralTable(const OrbitalSet& orbitals, double nuclear_charge, const AngularCoupling& angular);

  std::size_t size() const { return m_; }
  double one_body(std::size_t i, std::size_t j) const { return h_(i, j); }
  const Eigen::MatrixXd& one_body() const { return h_; }
  double two_body(std::size_t i, std::size_t j, std::size_t k, std::size_t l) const {
    return g_[((i * m_ + j) * m_ + k) * m_ + l];
  }
  const PairPotential& pair(std::size_t k, std::size_t l) const { return pairs_[k * m_ + l]; }

 private:
  std::size_t m_;
  Eigen::MatrixXd h_;
  std::vector<double> g_;
  std::vector<PairPotential> pairs_;
};

/// Hamiltonian matrix between the determinants of cs by the Slater-Condon
/// rules (diagonal, single and double replacements).
Eigen::MatrixXd slater_condon_matrix(const ConfigurationSet& cs, const IntegralTable& ints);

/// Same matrix from H = sum h_pq a+_p a_q + 1/2 sum (pq|rs) a+_p a+_r a_s a_q
/// applied to bit strings; an independent route used for cross-checks.
Eigen::MatrixXd second_quantized_matrix(const ConfigurationSet& cs, const IntegralTable& ints);

/// One-particle density matrix D_pq = sum_IJ c_I c_J <I|a+_p a_q|J>.
Eigen::MatrixXd one_rdm(const ConfigurationSet& cs);

/// Two-particle coefficients in chemist order, symmetrized over the real
/// orbital symmetries (ij) <-> (ji), (kl) <-> (lk), (ij) <-> (kl):
///   E = sum D_ij h_ij + 1/2 sum A_ijkl (ij|kl).
/// For a single determinant A_ijkl = d_ij d_kl - (d_il d_jk + d_ik d_jl)/2.
std::vector<double> two_rdm(const ConfigurationSet& cs);

struct ReducedCoefficients {
  std::size_t m = 0;
  std::vector<double> gamma;          // diagonal of D
  Eigen::MatrixXd one_rdm;            // D
  std::vector<double> A;              // m^4, chemist order
  Eigen::MatrixXd lambda;             // lambda_ij = <u_j, G_i>, same channel
  Eigen::MatrixXd H_CI;
  double E_CI = 0.0;                  // lowest eigenvalue of H_CI
  std::vector<double> ci_vector;      // its eigenvector (largest |c| positive)
  double energy = 0.0;                // c^T H_CI c at the given c

  double a(std::size_t i, std::size_t j, std::size_t k, std::size_t l) const {
    return A[((i * m + j) * m + k) * m + l];
  }
};

/// Orbital gradients G_i = sum_j D_ij h u_j + sum_jkl A_ijkl sum_lambda
/// C^lambda(ij;kl) Y^lambda_kl u_j projected on the channel of orbital i;
/// G_i = 1/2 dE/du_i. Stationarity is G_i = sum_j lambda_ij u_j. With
/// `accurate` the one-body operator uses the 4th-order stencil.
std::vector<std::vector<double>> orbital_gradients(const OrbitalSet& orbitals, const IntegralTable& ints,
                                                   const Eigen::MatrixXd& D, const std::vector<double>& A,
                                                   double nuclear_charge, const AngularCoupling& angular,
                                                   bool accurate = false);

/// Throws ConsistencyError for non-orthonormal orbitals (1e-8) or M mismatch,
/// UnsupportedError unless the frame is a single nucleus at the origin.
ReducedCoefficients reduced_coefficients(const ConfigurationSet& cs, const OrbitalSet& orbitals,
                                         const NuclearFrame& frame);

/// c^T H_CI c.
double configuration_energy(const ConfigurationSet& cs, const OrbitalSet& orbitals, const NuclearFrame& frame);

/// Lowest eigenpair of a symmetric CI matrix; largest |c| component positive.
std::pair<double, std::vector<double>> lowest_ci_eigenpair(const Eigen::MatrixXd& H);

/// Coupling table large enough for the channels of an orbital set.
AngularCoupling coupling_for(const OrbitalSet& orbitals, int l_max = 0);

}  // namespace ksatom
