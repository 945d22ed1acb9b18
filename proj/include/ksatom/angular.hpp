#pragma once

#include <vector>

namespace ksatom {

/// Angular label of a single-channel orbital: real spherical harmonic Y_lm,
/// m in [-l, l] (m < 0 sine-type, m > 0 cosine-type).
struct Channel {
  int l = 0;
  int m = 0;
  friend bool operator==(const Channel&, const Channel&) = default;
  friend auto operator<=>(const Channel&, const Channel&) = default;
};

/// Real orthonormal spherical harmonic at polar angle theta, azimuth phi.
double real_spherical_harmonic(int l, int m, double theta, double phi);

/// Table of real Gaunt integrals <Y_a Y_b Y_{lambda mu}> for channels with
/// l <= l_max and lambda <= 2 l_max, and the multipole coupling
///
///   C^lambda(ab; cd) = 4pi/(2 lambda+1) sum_mu <Y_a Y_b Y_lm_mu> <Y_c Y_d Y_lm_mu>
///
/// so that, for reduced radial functions u,
///   (ab|cd) = sum_lambda C^lambda(ab;cd) int u_a u_b Y^lambda[u_c u_d] dr.
class AngularCoupling {
 public:
  explicit AngularCoupling(int l_max);

  int l_max() const { return l_max_; }
  int lambda_max() const { return 2 * l_max_; }

  double gaunt(Channel a, Channel b, int lambda, int mu) const;
  double coupling(int lambda, Channel a, Channel b, Channel c, Channel d) const;

  /// Multipole orders with a possibly nonzero <Y_a Y_b Y_lambda> (triangle and parity).
  std::vector<int> lambdas(Channel a, Channel b) const;

 private:
  int index(Channel c) const { return c.l * c.l + c.l + c.m; }
  int lambda_index(int lambda, int mu) const { return lambda * lambda + lambda + mu; }

  int l_max_;
  int n_channels_;
  int n_lambda_;
  std::vector<double> gaunt_;
};

}  // namespace ksatom
