#pragma once

// Kustaanheimo-Stiefel map K: R^4 -> R^3, its circle fibers, and pullbacks of
// radial functions. Everything here is a pure function.

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace ksatom {

struct KsPoint {
  std::array<double, 4> y{};
  double norm() const;
};

struct SpatialPoint {
  std::array<double, 3> x{};
  double norm() const;
};

SpatialPoint operator-(const SpatialPoint& a, const SpatialPoint& b);

/// Samples (r, f(r)) of a radial function. Radii strictly increasing, r_0 >= 0.
class RadialProfile {
 public:
  RadialProfile() = default;
  RadialProfile(std::vector<double> radii, std::vector<double> values);

  std::size_t size() const { return radii_.size(); }
  std::span<const double> radii() const { return radii_; }
  std::span<const double> values() const { return values_; }
  double radius(std::size_t i) const { return radii_[i]; }
  double value(std::size_t i) const { return values_[i]; }

  /// Local cubic (4-point Lagrange) interpolation. Throws RangeError outside
  /// [radii.front(), radii.back()].
  double interpolate(double r) const;

  /// True when the spacing is constant to 1e-9 relative.
  bool uniform() const;

 private:
  std::vector<double> radii_;
  std::vector<double> values_;
};

SpatialPoint ks_map(const KsPoint& p);

/// A point of the fiber K^{-1}(x). Throws DomainError for x = 0.
KsPoint primary_preimage(const SpatialPoint& x);

/// Circle action y -> A(t) y that leaves ks_map invariant.
KsPoint fiber_rotate(const KsPoint& p, double t);

/// g(s) = f(s^2) on the given s values. Throws RangeError when some s^2 falls
/// outside the sampled range of f.
RadialProfile pullback_radial(const RadialProfile& f, std::span<const double> s_grid);

/// Radial part of the 4D Laplacian, g'' + (3/s) g', on a uniform grid.
/// 4th-order central differences in the interior, 2nd-order one-sided at the
/// ends. A profile starting at s = 0 is treated as even through the origin
/// and uses Delta g(0) = 4 g''(0). Throws SizeError below 5 samples.
RadialProfile laplacian4_radial(const RadialProfile& g);

/// || |y| phi_K ||^2 over K^{-1}(B_3(0, r_max)) for a radial phi, computed in
/// the s = |y| variable with the 4D measure 2 pi^2 s^3 ds.
double weighted_pullback_norm(const RadialProfile& phi, double r_max);

/// ||phi||^2 over B_3(0, r_max) for a radial phi (measure 4 pi r^2 dr).
double radial_norm_squared(const RadialProfile& phi, double r_max);

}  // namespace ksatom
