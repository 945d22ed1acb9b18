#include "ksatom/ks_transform.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ksatom/errors.hpp"
#include "ksatom/quadrature.hpp"

namespace ksatom {

double KsPoint::norm() const { return std::hypot(std::hypot(y[0], y[1]), std::hypot(y[2], y[3])); }

double SpatialPoint::norm() const { return std::hypot(x[0], x[1], x[2]); }

SpatialPoint operator-(const SpatialPoint& a, const SpatialPoint& b) {
  return {{a.x[0] - b.x[0], a.x[1] - b.x[1], a.x[2] - b.x[2]}};
}

RadialProfile::RadialProfile(std::vector<double> radii, std::vector<double> values)
    : radii_(std::move(radii)), values_(std::move(values)) {
  if (radii_.size() != values_.size()) {
    throw ConsistencyError("RadialProfile: radii and values differ in length");
  }
  if (!radii_.empty() && !(radii_.front() >= 0.0)) {
    throw DomainError("RadialProfile: first radius must be >= 0");
  }
  for (std::size_t i = 1; i < radii_.size(); ++i) {
    if (!(radii_[i] > radii_[i - 1])) {
      throw DomainError("RadialProfile: radii must be strictly increasing");
    }
  }
}

double RadialProfile::interpolate(double r) const {
  const std::size_t n = radii_.size();
  if (n == 0) throw RangeError("RadialProfile: empty profile");
  const double span = radii_.back() - radii_.front();
  const double slack = 1e-12 * std::max(1.0, std::abs(radii_.back()));
  if (r < radii_.front() - slack || r > radii_.back() + slack) {
    throw RangeError("RadialProfile: r = " + std::to_string(r) + " outside [" +
                     std::to_string(radii_.front()) + ", " + std::to_string(radii_.back()) + "]");
  }
  if (n == 1 || span == 0.0) return values_.front();
  if (n < 4) {
    // linear fallback for tiny profiles
    auto it = std::upper_bound(radii_.begin(), radii_.end(), r);
    std::size_t hi = std::clamp<std::size_t>(it - radii_.begin(), 1, n - 1);
    const double t = (r - radii_[hi - 1]) / (radii_[hi] - radii_[hi - 1]);
    return (1 - t) * values_[hi - 1] + t * values_[hi];
  }
  auto it = std::upper_bound(radii_.begin(), radii_.end(), r);
  std::ptrdiff_t hi = it - radii_.begin();
  // stencil [start, start+3] brackets r as centrally as possible
  std::ptrdiff_t start = std::clamp<std::ptrdiff_t>(hi - 2, 0, static_cast<std::ptrdiff_t>(n) - 4);
  double result = 0.0;
  for (std::ptrdiff_t j = start; j < start + 4; ++j) {
    double basis = 1.0;
    for (std::ptrdiff_t k = start; k < start + 4; ++k) {
      if (k != j) basis *= (r - radii_[k]) / (radii_[j] - radii_[k]);
    }
    result += basis * values_[j];
  }
  return result;
}

bool RadialProfile::uniform() const {
  if (radii_.size() < 3) return true;
  const double step = radii_[1] - radii_[0];
  for (std::size_t i = 2; i < radii_.size(); ++i) {
    if (std::abs((radii_[i] - radii_[i - 1]) - step) > 1e-9 * step) return false;
  }
  return true;
}

SpatialPoint ks_map(const KsPoint& p) {
  const auto& y = p.y;
  return {{y[0] * y[0] - y[1] * y[1] - y[2] * y[2] + y[3] * y[3],
           2.0 * (y[0] * y[1] - y[2] * y[3]),
           2.0 * (y[0] * y[2] + y[1] * y[3])}};
}

namespace {

// Section on the region x1 + |x| >= |x|/2, with y4 = 0.
KsPoint direct_branch(double x1, double x2, double x3, double r) {
  const double a = std::sqrt(0.5 * (r + x1));
  return {{a, x2 / (2.0 * a), x3 / (2.0 * a), 0.0}};
}

}  // namespace

KsPoint primary_preimage(const SpatialPoint& x) {
  const double r = x.norm();
  if (r == 0.0) throw DomainError("primary_preimage: the fiber over the origin is a point");
  if (x.x[0] + r >= 0.5 * r) return direct_branch(x.x[0], x.x[1], x.x[2], r);
  // K(y2, y1, y4, y3) = (-x1, x2, x3): take the preimage of the reflected point
  // and swap coordinates pairwise.
  const KsPoint q = direct_branch(-x.x[0], x.x[1], x.x[2], r);
  return {{q.y[1], q.y[0], q.y[3], q.y[2]}};
}

KsPoint fiber_rotate(const KsPoint& p, double t) {
  const double c = std::cos(t);
  const double s = std::sin(t);
  const auto& y = p.y;
  return {{y[0] * c - y[3] * s, y[1] * c + y[2] * s, y[2] * c - y[1] * s, y[3] * c + y[0] * s}};
}

RadialProfile pullback_radial(const RadialProfile& f, std::span<const double> s_grid) {
  std::vector<double> s(s_grid.begin(), s_grid.end());
  std::vector<double> g(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) g[i] = f.interpolate(s[i] * s[i]);
  return RadialProfile(std::move(s), std::move(g));
}

RadialProfile laplacian4_radial(const RadialProfile& g) {
  const std::size_t n = g.size();
  if (n < 5) throw SizeError("laplacian4_radial: need at least 5 samples");
  if (!g.uniform()) throw ConsistencyError("laplacian4_radial: grid must be uniform");
  const double d = g.radius(1) - g.radius(0);
  const bool from_origin = g.radius(0) == 0.0;
  auto v = [&](std::ptrdiff_t i) {
    // even extension through s = 0
    return g.value(static_cast<std::size_t>(i < 0 ? -i : i));
  };
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::ptrdiff_t>(i);
    const double s = g.radius(i);
    double d2 = 0.0;
    double d1 = 0.0;
    const bool has_left2 = k >= 2 || from_origin;
    const bool has_left1 = k >= 1 || from_origin;
    if (has_left2 && i + 2 < n) {
      d2 = (-v(k + 2) + 16 * v(k + 1) - 30 * v(k) + 16 * v(k - 1) - v(k - 2)) / (12 * d * d);
      d1 = (-v(k + 2) + 8 * v(k + 1) - 8 * v(k - 1) + v(k - 2)) / (12 * d);
    } else if (has_left1 && i + 1 < n) {
      d2 = (v(k + 1) - 2 * v(k) + v(k - 1)) / (d * d);
      d1 = (v(k + 1) - v(k - 1)) / (2 * d);
    } else if (i == 0) {
      d2 = (2 * v(0) - 5 * v(1) + 4 * v(2) - v(3)) / (d * d);
      d1 = (-3 * v(0) + 4 * v(1) - v(2)) / (2 * d);
    } else {
      d2 = (2 * v(k) - 5 * v(k - 1) + 4 * v(k - 2) - v(k - 3)) / (d * d);
      d1 = (3 * v(k) - 4 * v(k - 1) + v(k - 2)) / (2 * d);
    }
    out[i] = s == 0.0 ? 4.0 * d2 : d2 + 3.0 * d1 / s;
  }
  return RadialProfile(std::vector<double>(g.radii().begin(), g.radii().end()), std::move(out));
}

namespace {

// phi is taken as zero outside its sampled range.
std::pair<double, double> covered_radii(const RadialProfile& phi, double r_max) {
  if (phi.size() == 0) return {0.0, 0.0};
  const double lo = phi.radius(0);
  const double hi = std::min(r_max, phi.radius(phi.size() - 1));
  return {lo, std::max(lo, hi)};
}

constexpr int kPanels = 400;

}  // namespace

double weighted_pullback_norm(const RadialProfile& phi, double r_max) {
  const auto [lo, hi] = covered_radii(phi, r_max);
  if (hi <= lo) return 0.0;
  const double pi = std::numbers::pi;
  auto integrand = [&](double s) {
    const double r = std::clamp(s * s, lo, hi);
    const double f = phi.interpolate(r);
    return s * s * s * s * s * f * f;
  };
  return 2.0 * pi * pi * integrate_panels(integrand, std::sqrt(lo), std::sqrt(hi), kPanels);
}

double radial_norm_squared(const RadialProfile& phi, double r_max) {
  const auto [lo, hi] = covered_radii(phi, r_max);
  if (hi <= lo) return 0.0;
  auto integrand = [&](double r) {
    const double f = phi.interpolate(std::clamp(r, lo, hi));
    return r * r * f * f;
  };
  return 4.0 * std::numbers::pi * integrate_panels(integrand, lo, hi, kPanels);
}

}  // namespace ksatom
