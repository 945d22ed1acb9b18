#include "ksatom/angular.hpp"

#include <cmath>
#include <numbers>

#include "ksatom/errors.hpp"
#include "ksatom/quadrature.hpp"

namespace ksatom {

namespace {

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

}  // namespace

double real_spherical_harmonic(int l, int m, double theta, double phi) {
  const int am = std::abs(m);
  if (l < 0 || am > l) throw DomainError("real_spherical_harmonic: need |m| <= l");
  const double pi = std::numbers::pi;
  const double norm = std::sqrt((2.0 * l + 1.0) / (4.0 * pi) * factorial(l - am) / factorial(l + am));
  const double p = std::assoc_legendre(static_cast<unsigned>(l), static_cast<unsigned>(am), std::cos(theta));
  if (m == 0) return norm * p;
  if (m > 0) return std::numbers::sqrt2 * norm * p * std::cos(am * phi);
  return std::numbers::sqrt2 * norm * p * std::sin(am * phi);
}

AngularCoupling::AngularCoupling(int l_max)
    : l_max_(l_max), n_channels_((l_max + 1) * (l_max + 1)), n_lambda_((2 * l_max + 1) * (2 * l_max + 1)) {
  if (l_max < 0) throw ConfigError("l_max", "must be >= 0");
  // product rule exact for the polynomial degree 4 l_max of the integrands
  const int n_theta = 2 * l_max + 4;
  const int n_phi = 8 * l_max + 8;
  const QuadratureRule gl = gauss_legendre(n_theta);
  const double dphi = 2.0 * std::numbers::pi / n_phi;

  std::vector<std::vector<double>> ylm(n_lambda_, std::vector<double>(n_theta * n_phi));
  std::vector<double> weight(n_theta * n_phi);
  for (int it = 0; it < n_theta; ++it) {
    const double theta = std::acos(gl.nodes[it]);
    for (int ip = 0; ip < n_phi; ++ip) {
      const int q = it * n_phi + ip;
      weight[q] = gl.weights[it] * dphi;
      for (int lam = 0; lam <= 2 * l_max; ++lam) {
        for (int mu = -lam; mu <= lam; ++mu) {
          ylm[lambda_index(lam, mu)][q] = real_spherical_harmonic(lam, mu, theta, ip * dphi);
        }
      }
    }
  }
  gaunt_.assign(static_cast<std::size_t>(n_channels_) * n_channels_ * n_lambda_, 0.0);
  for (int a = 0; a < n_channels_; ++a) {
    for (int b = 0; b < n_channels_; ++b) {
      for (int c = 0; c < n_lambda_; ++c) {
        double s = 0.0;
        for (std::size_t q = 0; q < weight.size(); ++q) s += weight[q] * ylm[a][q] * ylm[b][q] * ylm[c][q];
        if (std::abs(s) < 1e-14) s = 0.0;
        gaunt_[(static_cast<std::size_t>(a) * n_channels_ + b) * n_lambda_ + c] = s;
      }
    }
  }
}

double AngularCoupling::gaunt(Channel a, Channel b, int lambda, int mu) const {
  if (a.l > l_max_ || b.l > l_max_ || lambda > 2 * l_max_ || std::abs(mu) > lambda) {
    throw ConsistencyError("AngularCoupling: channel outside table");
  }
  return gaunt_[(static_cast<std::size_t>(index(a)) * n_channels_ + index(b)) * n_lambda_ +
                lambda_index(lambda, mu)];
}

double AngularCoupling::coupling(int lambda, Channel a, Channel b, Channel c, Channel d) const {
  double s = 0.0;
  for (int mu = -lambda; mu <= lambda; ++mu) s += gaunt(a, b, lambda, mu) * gaunt(c, d, lambda, mu);
  return 4.0 * std::numbers::pi / (2.0 * lambda + 1.0) * s;
}

std::vector<int> AngularCoupling::lambdas(Channel a, Channel b) const {
  std::vector<int> out;
  for (int lam = std::abs(a.l - b.l); lam <= a.l + b.l; lam += 2) {
    for (int mu = -lam; mu <= lam; ++mu) {
      if (gaunt(a, b, lam, mu) != 0.0) {
        out.push_back(lam);
        break;
      }
    }
  }
  return out;
}

}  // namespace ksatom
