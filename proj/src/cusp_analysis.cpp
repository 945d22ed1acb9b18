#include "ksatom/cusp_analysis.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "ksatom/errors.hpp"

namespace ksatom {

namespace {

double poly(const std::vector<double>& c, double x) {
  double v = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * x + *it;
  return v;
}

// Three-point derivatives on a non-uniform grid.
void derivatives(const std::vector<double>& r, const std::vector<double>& f, std::size_t i, double& d1, double& d2) {
  const double h1 = r[i] - r[i - 1];
  const double h2 = r[i + 1] - r[i];
  d1 = (-h2 / (h1 * (h1 + h2))) * f[i - 1] + ((h2 - h1) / (h1 * h2)) * f[i] + (h1 / (h2 * (h1 + h2))) * f[i + 1];
  d2 = 2.0 * (f[i - 1] / (h1 * (h1 + h2)) - f[i] / (h1 * h2) + f[i + 1] / (h2 * (h1 + h2)));
}

struct Suprema {
  double d1 = 0.0;
  double rd2 = 0.0;
  double d1_at_limit = 0.0;
};

Suprema suprema(const std::vector<double>& r, const std::vector<double>& f, double r_limit) {
  Suprema s;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i + 1 < r.size() && r[i] <= r_limit; ++i) {
    double d1 = 0.0;
    double d2 = 0.0;
    derivatives(r, f, i, d1, d2);
    s.d1 = std::max(s.d1, std::abs(d1));
    s.rd2 = std::max(s.rd2, r[i] * std::abs(d2));
    if (std::abs(r[i] - r_limit) < best) {
      best = std::abs(r[i] - r_limit);
      s.d1_at_limit = std::abs(d1);
    }
  }
  return s;
}

double stability_ratio(double fine, double coarse) {
  if (!std::isfinite(fine) || !std::isfinite(coarse)) return std::numeric_limits<double>::infinity();
  const double lo = std::min(fine, coarse);
  const double hi = std::max(fine, coarse);
  if (hi < 1e-14) return 1.0;
  return lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
}

}  // namespace

double CuspDecomposition::phi1(double r) const { return poly(even, r * r); }

double CuspDecomposition::phi2(double r) const { return poly(odd, r * r); }

double CuspDecomposition::evaluate(double r) const { return poly(coefficients, r); }

CuspDecomposition fit_profile(const RadialProfile& f, int l, const FitOptions& options, std::size_t nucleus) {
  if (options.degree < 3) throw DomainError("extract_decomposition: degree must be at least 3");
  if (!(options.window > 0.0)) throw DomainError("extract_decomposition: window must be positive");
  if (l < 0) throw DomainError("extract_decomposition: negative l");
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f.radius(i) > 0.0 && f.radius(i) <= options.window) idx.push_back(i);
  }
  const auto p = static_cast<Eigen::Index>(options.degree) + 1;
  if (static_cast<Eigen::Index>(idx.size()) < p + 3) {
    throw SizeError("extract_decomposition: window holds " + std::to_string(idx.size()) + " samples, need " +
                    std::to_string(p + 3));
  }
  const auto n = static_cast<Eigen::Index>(idx.size());
  Eigen::MatrixXd a(n, p);
  Eigen::VectorXd b(n);
  Eigen::VectorXd w(n);
  for (Eigen::Index q = 0; q < n; ++q) {
    const std::size_t i = idx[q];
    // trapezoid weights in r: continuous L2 fit on the window
    const double left = i > 0 ? f.radius(i - 1) : f.radius(i);
    const double right = i + 1 < f.size() ? std::min(f.radius(i + 1), options.window) : f.radius(i);
    w(q) = std::sqrt(std::max(0.5 * (right - left), 1e-300));
    const double t = f.radius(i) / options.window;
    double tp = 1.0;
    for (Eigen::Index c = 0; c < p; ++c) {
      a(q, c) = w(q) * tp;
      tp *= t;
    }
    b(q) = w(q) * f.value(i);
  }
  const Eigen::VectorXd x = a.colPivHouseholderQr().solve(b);

  CuspDecomposition d;
  d.nucleus = nucleus;
  d.l = l;
  d.window = options.window;
  double scale = 1.0;
  for (Eigen::Index c = 0; c < p; ++c) {
    d.coefficients.push_back(x(c) / scale);
    (c % 2 == 0 ? d.even : d.odd).push_back(x(c) / scale);
    scale *= options.window;
  }
  const double bn = b.norm();
  d.residual = bn > 0.0 ? (a * x - b).norm() / bn : (a * x - b).norm();
  d.poor_fit = !(d.residual <= options.residual_threshold);
  return d;
}

CuspDecomposition extract_decomposition(const RadialProfile& u, int l, const FitOptions& options,
                                        std::size_t nucleus) {
  if (l < 0) throw DomainError("extract_decomposition: negative l");
  std::vector<double> r;
  std::vector<double> f;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u.radius(i) <= 0.0) continue;
    r.push_back(u.radius(i));
    f.push_back(u.value(i) / std::pow(u.radius(i), l + 1));
  }
  return fit_profile(RadialProfile(std::move(r), std::move(f)), l, options, nucleus);
}

double cusp_ratio(const CuspDecomposition& d) {
  if (d.l != 0) throw PreconditionError("cusp_ratio: only defined for l = 0");
  if (d.coefficients.size() < 2 || std::abs(d.coefficients[0]) < 1e-12) {
    throw DegenerateValueError("cusp_ratio: a0 vanishes");
  }
  return d.coefficients[1] / d.coefficients[0];
}

DensityDecomposition density_decomposition(const Density& rho, std::size_t k, const FitOptions& options) {
  if (k != 0) throw UnsupportedError("density_decomposition: only atoms at the origin are supported");
  DensityDecomposition out;
  out.fit = fit_profile(rho.rho, 0, options, k);
  const double a0 = out.fit.coefficients[0];
  if (std::abs(a0) < 1e-12) throw DegenerateValueError("density_decomposition: density vanishes at the nucleus");
  out.ratio = out.fit.coefficients[1] / a0;
  return out;
}

DerivativeBounds derivative_bound_check_profile(const RadialProfile& f, double r_limit) {
  std::vector<double> r;
  std::vector<double> v;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f.radius(i) <= 0.0) continue;
    r.push_back(f.radius(i));
    v.push_back(f.value(i));
  }
  DerivativeBounds out;
  out.r_limit = r_limit;
  if (r.size() < 3) throw SizeError("derivative_bound_check: need at least 3 samples");
  const Suprema fine = suprema(r, v, r_limit);
  std::vector<double> rc;
  std::vector<double> vc;
  const double r_cut = 16.0 * r.front();
  for (std::size_t i = 0; i < r.size(); i += 2) {
    if (r[i] >= r_cut) {
      rc.push_back(r[i]);
      vc.push_back(v[i]);
    }
  }
  const Suprema coarse = rc.size() >= 3 ? suprema(rc, vc, r_limit) : fine;
  out.sup_d1 = fine.d1;
  out.sup_rd2 = fine.rd2;
  out.coarse_sup_d1 = coarse.d1;
  out.coarse_sup_rd2 = coarse.rd2;
  out.ratio_d1 = stability_ratio(fine.d1, coarse.d1);
  out.ratio_rd2 = stability_ratio(fine.rd2, coarse.rd2);
  out.lipschitz = fine.d1 <= 2.0 * fine.d1_at_limit + 1e-12;
  out.stable = std::isfinite(fine.d1) && std::isfinite(fine.rd2) && out.ratio_d1 <= 1.2 && out.ratio_rd2 <= 1.2;
  return out;
}

DerivativeBounds derivative_bound_check(const RadialProfile& u, int l, std::size_t k, double r_limit) {
  if (k != 0) throw UnsupportedError("derivative_bound_check: only atoms at the origin are supported");
  std::vector<double> r;
  std::vector<double> f;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u.radius(i) <= 0.0) continue;
    r.push_back(u.radius(i));
    f.push_back(u.value(i) / std::pow(u.radius(i), l + 1));
  }
  return derivative_bound_check_profile(RadialProfile(std::move(r), std::move(f)), r_limit);
}

}  // namespace ksatom
