#include <catch_amalgamated.hpp>
#include <cmath>

#include "ksatom/errors.hpp"
#include "ksatom/system_model.hpp"

using namespace ksatom;
using Catch::Matchers::WithinAbs;

namespace {

OrbitalSet hydrogenic(const RadialGrid& g, double Z) {
  const auto V = nuclear_potential(g, Z);
  const auto s = eigensolve_radial(V, 0, 2, g);
  const auto p = eigensolve_radial(V, 1, 1, g);
  return OrbitalSet(g, {{{0, 0}, s[0].u}, {{0, 0}, s[1].u}, {{1, 0}, p[0].u}, {{1, -1}, p[0].u}});
}

double energy_from_rdms(const ConfigurationSet& cs, const IntegralTable& t) {
  const auto D = one_rdm(cs);
  const auto A = two_rdm(cs);
  const std::size_t m = t.size();
  double e = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) e += D(i, j) * t.one_body(i, j);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t k = 0; k < m; ++k)
        for (std::size_t l = 0; l < m; ++l) e += 0.5 * A[((i * m + j) * m + k) * m + l] * t.two_body(i, j, k, l);
  return e;
}

}  // namespace

TEST_CASE("Slater-Condon rules agree with second quantization") {
  const RadialGrid g(800, 1e-4, 40);
  const OrbitalSet orbs = hydrogenic(g, 2.0);
  const IntegralTable t(orbs, 2.0, coupling_for(orbs, 1));
  for (int n : {1, 2, 3}) {
    const ConfigurationSet cs(n, 4);
    const auto H1 = slater_condon_matrix(cs, t);
    const auto H2 = second_quantized_matrix(cs, t);
    CHECK((H1 - H2).norm() <= 1e-12 * (1 + H1.norm()));
    CHECK((H1 - H1.transpose()).norm() <= 1e-12 * H1.norm());
  }
  // (ij|kl) symmetries
  CHECK_THAT(t.two_body(0, 2, 1, 2), WithinAbs(t.two_body(2, 0, 2, 1), 1e-12));
  CHECK_THAT(t.two_body(0, 1, 2, 2), WithinAbs(t.two_body(2, 2, 0, 1), 1e-12));
  CHECK_THAT(t.two_body(0, 2, 0, 3), WithinAbs(0.0, 1e-14));
}

TEST_CASE("reduced density matrices") {
  const RadialGrid g(800, 1e-4, 40);
  const OrbitalSet orbs = hydrogenic(g, 2.0);
  const IntegralTable t(orbs, 2.0, coupling_for(orbs, 1));
  const int n = 2;
  std::vector<double> c{0.7, 0.1, -0.3, 0.2, 0.5, -0.2};
  double nrm = 0;
  for (double x : c) nrm += x * x;
  for (double& x : c) x /= std::sqrt(nrm);
  const ConfigurationSet cs(n, 4, c);

  const auto D = one_rdm(cs);
  CHECK_THAT(D.trace(), WithinAbs(n, 1e-13));
  const auto occ = occupations(cs);
  for (int i = 0; i < 4; ++i) CHECK_THAT(D(i, i), WithinAbs(occ[i], 1e-13));
  const auto A = two_rdm(cs);
  double sum = 0.0;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t k = 0; k < 4; ++k) sum += A[((i * 4 + i) * 4 + k) * 4 + k];
  CHECK_THAT(sum, WithinAbs(n * (n - 1), 1e-12));

  const Eigen::Map<const Eigen::VectorXd> cv(c.data(), 6);
  const double e_ci = cv.dot(slater_condon_matrix(cs, t) * cv);
  CHECK_THAT(energy_from_rdms(cs, t), WithinAbs(e_ci, 1e-11));
  CHECK_THAT(configuration_energy(cs, orbs, NuclearFrame({{{{0, 0, 0}}, 2.0}})), WithinAbs(e_ci, 1e-11));

  const auto rc = reduced_coefficients(cs, orbs, NuclearFrame({{{{0, 0, 0}}, 2.0}}));
  CHECK_THAT(rc.energy, WithinAbs(e_ci, 1e-11));
  CHECK(rc.E_CI <= rc.energy + 1e-12);
}

TEST_CASE("orbital gradients are half the energy derivative") {
  const RadialGrid g(600, 1e-4, 30);
  const OrbitalSet orbs = hydrogenic(g, 2.0);
  const ConfigurationSet cs(2, 4, {0.8, 0.0, 0.0, 0.0, 0.0, 0.6});
  const auto D = one_rdm(cs);
  const auto A = two_rdm(cs);
  const auto ang = coupling_for(orbs, 1);
  const IntegralTable t(orbs, 2.0, ang);
  const auto G = orbital_gradients(orbs, t, D, A, 2.0, ang);

  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) v[i] = g.r(i) * g.r(i) * std::exp(-g.r(i));
  const double h = 1e-5;
  for (std::size_t i = 0; i < 4; ++i) {
    auto energy_at = [&](double eps) {
      OrbitalSet o = orbs;
      for (std::size_t n = 0; n < g.size(); ++n) o[i].u[n] += eps * v[n];
      return energy_from_rdms(cs, IntegralTable(o, 2.0, ang));
    };
    const double fd = (energy_at(h) - energy_at(-h)) / (2 * h);
    CHECK_THAT(fd, WithinAbs(2 * g.inner(G[i], v), 1e-7));
  }
}

TEST_CASE("reduced coefficients reject bad input") {
  const RadialGrid g(400, 1e-4, 30);
  OrbitalSet orbs = hydrogenic(g, 2.0);
  const NuclearFrame he({{{{0, 0, 0}}, 2.0}});
  CHECK_THROWS_AS(reduced_coefficients(ConfigurationSet(2, 3), orbs, he), ConsistencyError);
  const NuclearFrame h2({{{{0, 0, 0}}, 1.0}, {{{0, 0, 1.4}}, 1.0}});
  CHECK_THROWS_AS(reduced_coefficients(ConfigurationSet(2, 4), orbs, h2), UnsupportedError);
  for (double& x : orbs[1].u) x *= 1.01;
  CHECK_THROWS_AS(reduced_coefficients(ConfigurationSet(2, 4), orbs, he), ConsistencyError);
}
