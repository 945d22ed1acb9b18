#include <catch_amalgamated.hpp>
#include <cmath>
#include <numbers>

#include "ksatom/angular.hpp"
#include "ksatom/quadrature.hpp"

using namespace ksatom;
using Catch::Matchers::WithinAbs;

namespace {

// Product rule on the sphere: Gauss-Legendre in cos(theta), trapezoid in phi.
template <class F>
double sphere(F f, int n = 24) {
  const auto q = gauss_legendre(n);
  const int nphi = 2 * n;
  double s = 0.0;
  for (std::size_t i = 0; i < q.nodes.size(); ++i) {
    const double th = std::acos(q.nodes[i]);
    for (int k = 0; k < nphi; ++k) {
      const double ph = 2 * std::numbers::pi * k / nphi;
      s += q.weights[i] * (2 * std::numbers::pi / nphi) * f(th, ph);
    }
  }
  return s;
}

}  // namespace

TEST_CASE("real spherical harmonics are orthonormal") {
  std::vector<Channel> chs;
  for (int l = 0; l <= 3; ++l)
    for (int m = -l; m <= l; ++m) chs.push_back({l, m});
  for (Channel a : chs) {
    for (Channel b : chs) {
      const double s = sphere([&](double t, double p) {
        return real_spherical_harmonic(a.l, a.m, t, p) * real_spherical_harmonic(b.l, b.m, t, p);
      });
      CHECK_THAT(s, WithinAbs(a == b ? 1.0 : 0.0, 1e-12));
    }
  }
  CHECK_THAT(real_spherical_harmonic(1, 0, 0.3, 1.1), WithinAbs(std::sqrt(3 / (4 * std::numbers::pi)) * std::cos(0.3), 1e-14));
}

TEST_CASE("Gaunt table matches direct quadrature") {
  const AngularCoupling ang(2);
  const Channel a{1, -1}, b{2, 1};
  for (int lam = 0; lam <= 4; ++lam) {
    for (int mu = -lam; mu <= lam; ++mu) {
      const double s = sphere([&](double t, double p) {
        return real_spherical_harmonic(a.l, a.m, t, p) * real_spherical_harmonic(b.l, b.m, t, p) *
               real_spherical_harmonic(lam, mu, t, p);
      });
      CHECK_THAT(ang.gaunt(a, b, lam, mu), WithinAbs(s, 1e-12));
    }
  }
}

TEST_CASE("multipole couplings") {
  const AngularCoupling ang(1);
  const Channel s{0, 0}, pz{1, 0}, px{1, 1};
  CHECK_THAT(ang.coupling(0, s, s, s, s), WithinAbs(1.0, 1e-14));
  CHECK_THAT(ang.coupling(0, pz, pz, s, s), WithinAbs(1.0, 1e-14));
  // (s pz | s pz) exchange-type term carries 1/3
  CHECK_THAT(ang.coupling(1, s, pz, s, pz), WithinAbs(1.0 / 3.0, 1e-14));
  CHECK_THAT(ang.coupling(1, s, pz, s, px), WithinAbs(0.0, 1e-14));
  CHECK(ang.lambdas(s, pz) == std::vector<int>{1});
  // the lambda = 0 Gaunt factor of two orthogonal harmonics vanishes
  CHECK(ang.lambdas(pz, px) == std::vector<int>{2});
  CHECK(ang.lambda_max() == 2);
}
