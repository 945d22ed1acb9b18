#include "ksatom/lifted_verifier.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "ksatom/errors.hpp"
#include "scf_internal.hpp"

namespace ksatom {

namespace {

const double kInvSqrt4Pi = 1.0 / std::sqrt(4.0 * std::numbers::pi);

std::vector<double> s_grid(const LiftOptions& o) {
  if (!(o.window > 0.0)) throw DomainError("lift: window must be positive");
  if (o.points < 5) throw SizeError("lift: need at least 5 s samples");
  const double s_max = std::sqrt(o.window);
  std::vector<double> s(o.points);
  for (std::size_t i = 0; i < o.points; ++i) s[i] = s_max * static_cast<double>(i) / static_cast<double>(o.points - 1);
  return s;
}

// Radial function sampled on the log grid, with a least-squares cubic on
// [r_0, 8 r_0] standing in below the first sample (Lagrange extrapolation
// through the clustered nodes there amplifies roundoff).
class RadialFunction {
 public:
  RadialFunction(std::span<const double> r, std::vector<double> f) {
    std::vector<double> rr;
    std::vector<double> ff;
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (r[i] <= 0.0) continue;
      rr.push_back(r[i]);
      ff.push_back(f[i]);
    }
    if (rr.size() < 8) throw SizeError("lift: too few samples");
    r0_ = rr.front();
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < rr.size() && rr[i] <= 8.0 * r0_; ++i) idx.push_back(i);
    if (idx.size() < 8) idx = {0, 1, 2, 3, 4, 5, 6, 7};
    Eigen::MatrixXd a(static_cast<Eigen::Index>(idx.size()), 4);
    Eigen::VectorXd b(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t q = 0; q < idx.size(); ++q) {
      const double t = rr[idx[q]] / r0_;
      const auto row = static_cast<Eigen::Index>(q);
      a(row, 0) = 1.0;
      a(row, 1) = t;
      a(row, 2) = t * t;
      a(row, 3) = t * t * t;
      b(row) = ff[idx[q]];
    }
    poly_ = a.colPivHouseholderQr().solve(b);
    data_ = RadialProfile(std::move(rr), std::move(ff));
  }

  double operator()(double r) const {
    if (r >= r0_) return data_.interpolate(r);
    const double t = r / r0_;
    return poly_(0) + t * (poly_(1) + t * (poly_(2) + t * poly_(3)));
  }

 private:
  RadialProfile data_;
  Eigen::Vector4d poly_;
  double r0_ = 0.0;
};

RadialFunction divide_by_r(std::span<const double> r, std::span<const double> u, double scale) {
  std::vector<double> f(r.size(), 0.0);
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (r[i] > 0.0) f[i] = scale * u[i] / r[i];
  }
  return RadialFunction(r, std::move(f));
}

// s grid extended by two samples so the Laplacian stencil stays central at s_max
std::vector<double> extended(const std::vector<double>& s) {
  std::vector<double> e = s;
  const double d = s[1] - s[0];
  e.push_back(s.back() + d);
  e.push_back(s.back() + 2.0 * d);
  return e;
}

std::vector<double> lift_values(const RadialFunction& f, const std::vector<double>& s) {
  std::vector<double> g(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) g[i] = f(s[i] * s[i]);
  return g;
}

// sqrt(2 pi^2 int res^2 s^3 ds), trapezoid on the uniform s grid
double norm4(const std::vector<double>& s, const std::vector<double>& res) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    const double a = res[i] * res[i] * s[i] * s[i] * s[i];
    const double b = res[i + 1] * res[i + 1] * s[i + 1] * s[i + 1] * s[i + 1];
    acc += 0.5 * (a + b) * (s[i + 1] - s[i]);
  }
  return std::sqrt(2.0 * std::numbers::pi * std::numbers::pi * acc);
}

// Delta_4 of f(s^2) on s, computed on the extended grid
std::vector<double> lifted_laplacian(const RadialFunction& f, const std::vector<double>& s) {
  const auto e = extended(s);
  const RadialProfile lap = laplacian4_radial(RadialProfile(e, lift_values(f, e)));
  return {lap.values().begin(), lap.values().begin() + static_cast<std::ptrdiff_t>(s.size())};
}

}  // namespace

double LiftedReport::max_orbital() const {
  double m = 0.0;
  for (double r : orbital_residuals) m = std::max(m, r);
  return m;
}

double LiftedReport::max_pair() const {
  double m = 0.0;
  for (const auto& p : pair_residuals) m = std::max(m, p.norm);
  return m;
}

LiftedProfile lift_profile(const RadialProfile& f, const LiftOptions& options) {
  const auto s = s_grid(options);
  const RadialFunction src(f.radii(), {f.values().begin(), f.values().end()});
  return {RadialProfile(s, lift_values(src, s)), 0, 0};
}

LiftedProfile lift_channel(const RadialProfile& u, int l, const LiftOptions& options, std::size_t orbital) {
  if (l != 0) throw UnsupportedError("lift_channel: only l = 0 channels can be lifted");
  const auto s = s_grid(options);
  const RadialFunction f = divide_by_r(u.radii(), u.values(), kInvSqrt4Pi);
  return {RadialProfile(s, lift_values(f, s)), orbital, 0};
}

LiftedReport lifted_residual(const ScfResult& result, std::size_t k, const LiftOptions& options) {
  if (!result.converged) throw PreconditionError("lifted_residual: result is not converged");
  if (k != 0 || !result.model.frame.is_atom_at_origin()) {
    throw UnsupportedError("lifted_residual: only atoms at the origin are supported");
  }
  const auto& orbs = result.orbitals;
  const auto& grid = orbs.grid();
  const std::size_t m = orbs.size();
  const std::size_t n = grid.size();
  const double z = result.model.frame[0].charge;
  const auto s = s_grid(options);
  const auto radii = grid.radii();

  // interaction part of each orbital equation, in reduced form
  Eigen::MatrixXd D;
  Eigen::MatrixXd lambda = result.multipliers;
  std::vector<std::vector<double>> F(m, std::vector<double>(n, 0.0));
  if (result.mode == Mode::hartree) {
    D = Eigen::MatrixXd::Identity(m, m);
    for (std::size_t i = 0; i < m; ++i) {
      std::vector<double> w(m, 1.0);
      w[i] = 0.0;
      const auto pot = build_direct(orbs, w, orbs[i].channel);
      for (std::size_t t = 0; t < n; ++t) F[i][t] = pot[t] * orbs[i].u[t];
    }
  } else {
    const AngularCoupling angular = coupling_for(orbs);
    const IntegralTable ints(orbs, z, angular);
    D = one_rdm(result.configuration);
    const auto A = two_rdm(result.configuration);
    F = orbital_gradients(orbs, ints, Eigen::MatrixXd::Zero(m, m), A, z, angular);
  }

  LiftedReport rep;
  rep.nucleus = k;
  rep.window = options.window;
  std::vector<std::vector<double>> g(m), lap(m);
  std::vector<std::size_t> s_orbs;
  for (std::size_t i = 0; i < m; ++i) {
    if (orbs[i].channel.l != 0) continue;
    s_orbs.push_back(i);
    const auto f = divide_by_r(radii, orbs[i].u, kInvSqrt4Pi);
    g[i] = lift_values(f, s);
    lap[i] = lifted_laplacian(f, s);
  }
  for (std::size_t i : s_orbs) {
    const auto w = lift_values(divide_by_r(radii, F[i], kInvSqrt4Pi), s);
    std::vector<double> res(s.size(), 0.0);
    for (std::size_t j : s_orbs) {
      const double d = D(i, j);
      const double lij = lambda(i, j);
      for (std::size_t q = 0; q < s.size(); ++q) {
        res[q] += d * (-lap[j][q] - 4.0 * z * g[j][q]) - 4.0 * s[q] * s[q] * lij * g[j][q];
      }
    }
    for (std::size_t q = 0; q < s.size(); ++q) res[q] += 4.0 * s[q] * s[q] * w[q];
    rep.orbitals.push_back(i);
    rep.orbital_residuals.push_back(norm4(s, res));
  }

  for (std::size_t a = 0; a < s_orbs.size(); ++a) {
    for (std::size_t b = a; b < s_orbs.size(); ++b) {
      const std::size_t i = s_orbs[a];
      const std::size_t j = s_orbs[b];
      std::vector<double> prod(n);
      for (std::size_t t = 0; t < n; ++t) prod[t] = orbs[i].u[t] * orbs[j].u[t];
      const RadialFunction phi(radii, multipole_potential(grid, prod, 0));
      const auto lp = lifted_laplacian(phi, s);
      std::vector<double> res(s.size());
      for (std::size_t q = 0; q < s.size(); ++q) {
        res[q] = -lp[q] - 16.0 * std::numbers::pi * s[q] * s[q] * g[i][q] * g[j][q];
      }
      rep.pair_residuals.push_back({i, j, norm4(s, res)});
    }
  }
  return rep;
}

SmoothnessReport smoothness_check(const LiftedProfile& g) {
  const auto s = g.g.radii();
  const auto v = g.g.values();
  const auto n = static_cast<Eigen::Index>(s.size());
  if (n < 8) throw SizeError("smoothness_check: need at least 8 samples");
  const double s_max = s.back();
  // scaled variable t = s / s_max keeps the basis well conditioned
  Eigen::MatrixXd a(n, 5);
  Eigen::VectorXd b(n);
  for (Eigen::Index q = 0; q < n; ++q) {
    const double t = s[q] / s_max;
    const double t2 = t * t;
    a(q, 0) = 1.0;
    a(q, 1) = t2;
    a(q, 2) = t2 * t2;
    a(q, 3) = t2 * t2 * t2;
    a(q, 4) = t > 0.0 ? t2 * t2 * std::log(t) : 0.0;
    b(q) = v[q];
  }
  const Eigen::VectorXd x = a.colPivHouseholderQr().solve(b);
  const Eigen::VectorXd x_even = a.leftCols(4).colPivHouseholderQr().solve(b);

  SmoothnessReport rep;
  const double s2 = s_max * s_max;
  const double scale[5] = {1.0, s2, s2 * s2, s2 * s2 * s2, s2 * s2};
  for (int c = 0; c < 5; ++c) rep.coefficients.push_back(x(c) / scale[c]);
  // t^4 log t = (s^4 log s - s^4 log s_max) / s_max^4, so the log coefficient
  // scales like the s^4 one; the s^4 coefficient absorbs the shift
  rep.coefficients[2] -= rep.coefficients[4] * std::log(s_max);
  rep.log_coefficient = rep.coefficients[4];
  double lead = 0.0;
  for (int c = 0; c < 4; ++c) lead = std::max(lead, std::abs(x(c)));
  rep.log_relative = lead > 0.0 ? std::abs(x(4)) / lead : std::abs(x(4));
  const double bn = b.norm();
  rep.even_residual = bn > 0.0 ? (a.leftCols(4) * x_even - b).norm() / bn : 0.0;
  return rep;
}

ScfResult perturb_orbitals(const ScfResult& result, double amplitude, unsigned seed) {
  std::mt19937 rng(seed);
  std::bernoulli_distribution coin(0.5);
  const auto& grid = result.orbitals.grid();
  std::vector<Orbital> out;
  for (std::size_t i = 0; i < result.orbitals.size(); ++i) {
    Orbital o = result.orbitals[i];
    const double xi = coin(rng) ? 1.0 : -1.0;
    for (std::size_t t = 0; t < o.u.size(); ++t) o.u[t] *= 1.0 + amplitude * xi * std::exp(-grid.r(t));
    const double nrm = detail::l2_norm(grid, o.u);
    for (double& x : o.u) x /= nrm;
    out.push_back(std::move(o));
  }
  ScfResult copy = result;
  copy.orbitals = OrbitalSet(grid, std::move(out));
  return copy;
}

}  // namespace ksatom
