#include <catch_amalgamated.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "ksatom/errors.hpp"
#include "ksatom/ks_transform.hpp"

using namespace ksatom;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  return v;
}

RadialProfile sample(double (*f)(double), double a, double b, std::size_t n) {
  auto r = linspace(a, b, n);
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = f(r[i]);
  return RadialProfile(r, v);
}

}  // namespace

TEST_CASE("map squares the norm and is constant on fibers") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> t(0, 2 * std::numbers::pi);
  for (int k = 0; k < 2000; ++k) {
    KsPoint y{{g(rng), g(rng), g(rng), g(rng)}};
    const double n2 = y.norm() * y.norm();
    const SpatialPoint x = ks_map(y);
    CHECK_THAT(x.norm(), WithinRel(n2, 1e-13));
    const KsPoint yr = fiber_rotate(y, t(rng));
    CHECK_THAT(yr.norm(), WithinRel(y.norm(), 1e-13));
    CHECK((ks_map(yr) - x).norm() <= 1e-13 * n2);
  }
}

TEST_CASE("preimage maps back and sits on the fiber") {
  for (const SpatialPoint x : {SpatialPoint{{1, 0, 0}}, SpatialPoint{{-1, 0, 0}}, SpatialPoint{{-3, 1e-9, 0}},
                               SpatialPoint{{0.2, -0.7, 1.3}}, SpatialPoint{{-5, 2, -1}}}) {
    const KsPoint y = primary_preimage(x);
    CHECK((ks_map(y) - x).norm() <= 1e-13 * x.norm());
    CHECK_THAT(y.norm() * y.norm(), WithinRel(x.norm(), 1e-13));
  }
  CHECK_THROWS_AS(primary_preimage(SpatialPoint{{0, 0, 0}}), DomainError);
}

TEST_CASE("cubic interpolation is exact for cubics and checks its range") {
  auto r = linspace(0.0, 2.0, 11);
  std::vector<double> v;
  for (double x : r) v.push_back(1 - 2 * x + 0.5 * x * x * x);
  const RadialProfile p(r, v);
  CHECK(p.uniform());
  for (double x : {0.0, 0.13, 0.999, 1.77, 2.0}) CHECK_THAT(p.interpolate(x), WithinAbs(1 - 2 * x + 0.5 * x * x * x, 1e-13));
  CHECK_THROWS_AS(p.interpolate(2.5), RangeError);
  CHECK_THROWS_AS(p.interpolate(-0.1), RangeError);
}

TEST_CASE("pullback composes with s^2") {
  const auto f = sample([](double r) { return std::exp(-r); }, 0.0, 4.0, 4001);
  const auto s = linspace(0.0, 1.9, 50);
  const RadialProfile g = pullback_radial(f, s);
  for (std::size_t i = 0; i < s.size(); ++i) CHECK_THAT(g.value(i), WithinAbs(std::exp(-s[i] * s[i]), 1e-11));
  const auto lin = sample([](double r) { return r; }, 0.0, 4.0, 101);
  const RadialProfile g2 = pullback_radial(lin, s);
  for (std::size_t i = 0; i < s.size(); ++i) CHECK_THAT(g2.value(i), WithinAbs(s[i] * s[i], 1e-13));
  CHECK_THROWS_AS(pullback_radial(f, std::vector<double>{0.5, 2.5}), RangeError);
}

TEST_CASE("4D radial Laplacian of a Gaussian") {
  // Delta_4 e^{-a s^2} = (4 a^2 s^2 - 8 a) e^{-a s^2}
  const double a = 0.7;
  const auto s = linspace(0.0, 2.0, 801);
  std::vector<double> g;
  for (double x : s) g.push_back(std::exp(-a * x * x));
  const RadialProfile lap = laplacian4_radial(RadialProfile(s, g));
  for (std::size_t i = 0; i + 2 < s.size(); i += 20) {
    const double exact = (4 * a * a * s[i] * s[i] - 8 * a) * std::exp(-a * s[i] * s[i]);
    CHECK_THAT(lap.value(i), WithinAbs(exact, 1e-8));
  }
  CHECK_THROWS_AS(laplacian4_radial(RadialProfile({0, 1, 2, 3}, {1, 1, 1, 1})), SizeError);
  CHECK_THROWS_AS(laplacian4_radial(RadialProfile({0, 1, 2, 4, 5}, {1, 1, 1, 1, 1})), ConsistencyError);
}

TEST_CASE("Laplacian identity through the pullback") {
  // (Delta_3 f)(s^2) = Delta_4 (f(s^2)) / (4 s^2) for f = 1/(1+r^2)
  const auto s = linspace(0.0, 1.6, 3201);
  std::vector<double> g;
  for (double x : s) g.push_back(1.0 / (1 + x * x * x * x));
  const RadialProfile lap = laplacian4_radial(RadialProfile(s, g));
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] < 0.2 || s[i] > 1.5) continue;
    const double r = s[i] * s[i];
    const double exact = (2 * r * r - 6) / std::pow(1 + r * r, 3);
    CHECK_THAT(lap.value(i) / (4 * r), WithinAbs(exact, 1e-7));
  }
}

TEST_CASE("weighted pullback norm is pi/4 of the plain norm") {
  const auto phi = sample([](double r) { return std::exp(-r); }, 0.0, 30.0, 20001);
  // plain: 4 pi int r^2 e^{-2r} = pi
  CHECK_THAT(radial_norm_squared(phi, 30.0), WithinRel(std::numbers::pi, 1e-9));
  CHECK_THAT(weighted_pullback_norm(phi, 30.0), WithinRel(std::numbers::pi * std::numbers::pi / 4, 1e-9));
}
