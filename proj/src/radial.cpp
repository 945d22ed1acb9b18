#include "ksatom/radial.hpp"

#include <algorithm>
#include <cmath>

#include "ksatom/errors.hpp"

namespace ksatom {

RadialGrid::RadialGrid(std::size_t points, double r_min, double r_max) {
  if (points < 64) throw ConfigError("grid.points", "need at least 64 points");
  if (!(r_min > 0.0)) throw ConfigError("grid.r_min", "must be positive");
  if (!(r_max > r_min)) throw ConfigError("grid.r_max", "must exceed r_min");
  const double x0 = std::log(r_min);
  h_ = (std::log(r_max) - x0) / static_cast<double>(points - 1);
  r_.resize(points);
  w_.resize(points);
  for (std::size_t i = 0; i < points; ++i) {
    r_[i] = std::exp(x0 + h_ * static_cast<double>(i));
    w_[i] = h_ * r_[i];
  }
  r_.front() = r_min;
  r_.back() = r_max;
  w_.front() = h_ * r_min;
  w_.back() = h_ * r_max;
}

double RadialGrid::integrate(std::span<const double> g) const {
  if (g.size() != size()) throw ConsistencyError("RadialGrid::integrate: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) s += w_[i] * g[i];
  return s;
}

double RadialGrid::inner(std::span<const double> a, std::span<const double> b) const {
  if (a.size() != size() || b.size() != size()) throw ConsistencyError("RadialGrid::inner: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += w_[i] * a[i] * b[i];
  return s;
}

RadialGrid RadialGrid::refined(int times) const {
  std::size_t p = size() - 1;
  for (int k = 0; k < times; ++k) p *= 2;
  return RadialGrid(p + 1, r_min(), r_max());
}

RadialGrid make_grid(std::size_t points, double r_min, double r_max) { return RadialGrid(points, r_min, r_max); }

OrbitalSet::OrbitalSet(RadialGrid grid, std::vector<Orbital> orbitals)
    : grid_(std::move(grid)), orbitals_(std::move(orbitals)) {
  for (const auto& o : orbitals_) {
    if (o.u.size() != grid_.size()) throw ConsistencyError("OrbitalSet: orbital size differs from grid");
    if (o.channel.l < 0 || std::abs(o.channel.m) > o.channel.l) {
      throw ConsistencyError("OrbitalSet: invalid channel");
    }
  }
}

Eigen::MatrixXd OrbitalSet::overlap() const {
  const auto n = static_cast<Eigen::Index>(orbitals_.size());
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      if (orbitals_[i].channel != orbitals_[j].channel) continue;
      s(i, j) = s(j, i) = grid_.inner(orbitals_[i].u, orbitals_[j].u);
    }
  }
  return s;
}

double OrbitalSet::orthonormality_error() const {
  const Eigen::MatrixXd s = overlap();
  return (s - Eigen::MatrixXd::Identity(s.rows(), s.cols())).cwiseAbs().maxCoeff();
}

std::vector<double> multipole_potential(const RadialGrid& grid, std::span<const double> f, int lambda) {
  const std::size_t n = grid.size();
  if (f.size() != n) throw ConsistencyError("multipole_potential: size mismatch");
  const double h = grid.log_step();
  const auto r = grid.radii();
  const auto w = grid.weights();
  std::vector<double> inner(n), outer(n, 0.0);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) acc *= std::pow(r[i - 1] / r[i], lambda + 1);
    acc += f[i] * w[i] / r[i];
    inner[i] = acc;
  }
  acc = 0.0;
  for (std::size_t i = n - 1; i-- > 0;) {
    acc = (acc + f[i + 1] * w[i + 1] / r[i + 1]) * std::pow(r[i] / r[i + 1], lambda);
    outer[i] = acc;
  }
  // Euler-Maclaurin: the h^2 corrections of the two partial trapezoid sums
  // combine into the local term -(h^2/12)(2 lambda+1) f(r).
  const double local = h * h / 12.0 * (2.0 * lambda + 1.0);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = inner[i] + outer[i] - local * f[i];
  return y;
}

double multipole_moment(const RadialGrid& grid, std::span<const double> f, int lambda) {
  double s = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) s += grid.weights()[i] * std::pow(grid.r(i), lambda) * f[i];
  return s;
}

PairPotential poisson_multipole(const Orbital& a, const Orbital& b, const RadialGrid& grid,
                                const AngularCoupling& angular) {
  if (a.u.size() != grid.size() || b.u.size() != grid.size()) {
    throw ConsistencyError("poisson_multipole: source not sampled on this grid");
  }
  if (a.channel.l > angular.l_max() || b.channel.l > angular.l_max()) {
    throw ConsistencyError("poisson_multipole: channel above l_max");
  }
  PairPotential pot{a.channel, b.channel, {}};
  pot.components.resize(static_cast<std::size_t>(angular.lambda_max()) + 1);
  std::vector<double> density(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) density[i] = a.u[i] * b.u[i];
  for (int lam : angular.lambdas(a.channel, b.channel)) {
    pot.components[lam] = multipole_potential(grid, density, lam);
  }
  return pot;
}

namespace {

// -D2 e^{kx} = -k_eff^2 e^{kx} for the 3- and 5-point stencils.
double centrifugal2(double kappa, double h) { return (2.0 * std::cosh(kappa * h) - 2.0) / (h * h); }
double centrifugal4(double kappa, double h) {
  return (32.0 * std::cosh(kappa * h) - 2.0 * std::cosh(2.0 * kappa * h) - 30.0) / (12.0 * h * h);
}

// w(r_{-k}) / w(r_0) for the regular solution w ~ r^{l+1/2} (1 + a r), where
// a = lim r U(r) / (2l+2) is read off the first grid point.
double ghost_ratio(const RadialGrid& grid, int l, std::span<const double> potential, int k) {
  const double h = grid.log_step();
  const double r0 = grid.r(0);
  const double a = r0 * potential[0] / (2.0 * l + 2.0);
  const double rk = r0 * std::exp(-k * h);
  return std::exp(-(l + 0.5) * k * h) * (1.0 + a * rk) / (1.0 + a * r0);
}

}  // namespace

double poisson_residual(const RadialGrid& grid, std::span<const double> potential, std::span<const double> f,
                        int lambda) {
  const std::size_t n = grid.size();
  const double h = grid.log_step();
  const double c = centrifugal4(lambda + 0.5, h);
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = std::sqrt(grid.r(i)) * potential[i];
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 2; i + 2 < n; ++i) {
    const double d2 = (-w[i + 2] + 16 * w[i + 1] - 30 * w[i] + 16 * w[i - 1] - w[i - 2]) / (12 * h * h);
    const double src = (2.0 * lambda + 1.0) * std::sqrt(grid.r(i)) * f[i];
    const double res = -d2 + c * w[i] - src;
    num += res * res;
    den += src * src;
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

TridiagonalPencil channel_pencil(const RadialGrid& grid, int l, std::span<const double> potential) {
  const std::size_t n = grid.size();
  if (potential.size() != n) throw ConsistencyError("channel_pencil: potential size mismatch");
  const double h = grid.log_step();
  const double kappa = l + 0.5;
  const double c = centrifugal2(kappa, h);
  std::vector<double> diag(n), off(n - 1, -1.0 / (h * h)), mass(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = grid.r(i);
    diag[i] = 2.0 / (h * h) + c + r * r * potential[i];
    mass[i] = r * r;
  }
  diag[0] -= ghost_ratio(grid, l, potential, 1) / (h * h);
  return TridiagonalPencil(std::move(diag), std::move(off), std::move(mass));
}

std::vector<double> to_pencil_space(const RadialGrid& grid, std::span<const double> u) {
  std::vector<double> w(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) w[i] = u[i] / std::sqrt(grid.r(i));
  return w;
}

std::vector<double> from_pencil_space(const RadialGrid& grid, std::span<const double> w) {
  std::vector<double> u(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) u[i] = w[i] * std::sqrt(grid.r(i));
  return u;
}

std::vector<RadialEigenpair> eigensolve_radial(std::span<const double> potential, int l, std::size_t count,
                                               const RadialGrid& grid) {
  if (count == 0) throw SizeError("eigensolve_radial: count must be >= 1");
  const TridiagonalPencil pencil = channel_pencil(grid, l, potential);
  std::vector<RadialEigenpair> out;
  std::vector<std::vector<double>> ws;
  for (std::size_t k = 0; k < count; ++k) {
    const double e = pencil.eigenvalue(k);
    std::vector<double> w = pencil.eigenvector(e);
    for (const auto& prev : ws) {
      double dot = 0.0;
      for (std::size_t i = 0; i < w.size(); ++i) dot += pencil.mass()[i] * prev[i] * w[i];
      for (std::size_t i = 0; i < w.size(); ++i) w[i] -= dot * prev[i];
    }
    double norm = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) norm += pencil.mass()[i] * w[i] * w[i];
    norm = std::sqrt(norm);
    for (double& v : w) v /= norm;
    ws.push_back(w);
    std::vector<double> u = from_pencil_space(grid, w);
    const double s = std::sqrt(grid.inner(u, u));
    for (double& v : u) v /= s;
    out.push_back({e, std::move(u)});
  }
  return out;
}

std::vector<double> apply_channel_hamiltonian(std::span<const double> u, int l, std::span<const double> potential,
                                              const RadialGrid& grid) {
  const std::size_t n = grid.size();
  if (u.size() != n || potential.size() != n) throw ConsistencyError("apply_channel_hamiltonian: size mismatch");
  const double h = grid.log_step();
  const double kappa = l + 0.5;
  const double c = centrifugal2(kappa, h);
  const double ghost = ghost_ratio(grid, l, potential, 1);
  const std::vector<double> w = to_pencil_space(grid, u);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double left = i > 0 ? w[i - 1] : ghost * w[0];
    const double right = i + 1 < n ? w[i + 1] : 0.0;
    const double r = grid.r(i);
    const double aw = (2.0 * w[i] - left - right) / (h * h) + (c + r * r * potential[i]) * w[i];
    out[i] = aw / (r * std::sqrt(r));
  }
  return out;
}

std::vector<double> apply_channel_hamiltonian_accurate(std::span<const double> u, int l,
                                                       std::span<const double> potential, const RadialGrid& grid) {
  const std::size_t n = grid.size();
  if (u.size() != n || potential.size() != n) throw ConsistencyError("apply_channel_hamiltonian: size mismatch");
  const double h = grid.log_step();
  const double kappa = l + 0.5;
  const double c = centrifugal4(kappa, h);
  const double ghost1 = ghost_ratio(grid, l, potential, 1);
  const double ghost2 = ghost_ratio(grid, l, potential, 2);
  const std::vector<double> w = to_pencil_space(grid, u);
  auto at = [&](std::ptrdiff_t i) {
    if (i < 0) return (i == -1 ? ghost1 : ghost2) * w[0];
    if (i >= static_cast<std::ptrdiff_t>(n)) return 0.0;
    return w[static_cast<std::size_t>(i)];
  };
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::ptrdiff_t>(i);
    const double d2 = (-at(k + 2) + 16 * at(k + 1) - 30 * at(k) + 16 * at(k - 1) - at(k - 2)) / (12 * h * h);
    const double r = grid.r(i);
    out[i] = (-d2 + (c + r * r * potential[i]) * w[i]) / (r * std::sqrt(r));
  }
  return out;
}

std::vector<double> nuclear_potential(const RadialGrid& grid, double charge) {
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) v[i] = -charge / grid.r(i);
  return v;
}

}  // namespace ksatom
