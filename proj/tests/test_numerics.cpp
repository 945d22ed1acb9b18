#include <Eigen/Dense>
#include <catch_amalgamated.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "ksatom/quadrature.hpp"
#include "ksatom/tridiagonal.hpp"

using namespace ksatom;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("Gauss-Legendre integrates polynomials up to degree 2n-1") {
  for (int n : {1, 4, 9, 16}) {
    const auto q = gauss_legendre(n);
    for (int k = 0; k <= 2 * n - 1; ++k) {
      double s = 0.0;
      for (std::size_t i = 0; i < q.nodes.size(); ++i) s += q.weights[i] * std::pow(q.nodes[i], k);
      const double exact = k % 2 ? 0.0 : 2.0 / (k + 1);
      CHECK_THAT(s, WithinAbs(exact, 1e-13));
    }
  }
}

TEST_CASE("Gauss-Laguerre moments are factorials") {
  const auto q = gauss_laguerre(12);
  double fact = 1.0;
  for (int k = 0; k < 24; ++k) {
    if (k > 0) fact *= k;
    double s = 0.0;
    for (std::size_t i = 0; i < q.nodes.size(); ++i) s += q.weights[i] * std::pow(q.nodes[i], k);
    CHECK_THAT(s, WithinRel(fact, 1e-10));
  }
}

TEST_CASE("composite panels") {
  CHECK_THAT(integrate_panels([](double x) { return std::sin(x); }, 0, std::numbers::pi, 8), WithinAbs(2.0, 1e-14));
  CHECK_THAT(integrate_panels([](double x) { return std::exp(-x) * x * x; }, 0, 40, 40), WithinRel(2.0, 1e-12));
}

namespace {

TridiagonalPencil random_pencil(std::size_t n, unsigned seed, Eigen::MatrixXd& A, Eigen::MatrixXd& B) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1, 1), pos(0.1, 3);
  std::vector<double> d(n), o(n - 1), m(n);
  A = Eigen::MatrixXd::Zero(n, n);
  B = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    d[i] = 4 * u(rng);
    m[i] = pos(rng);
    A(i, i) = d[i];
    B(i, i) = m[i];
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    o[i] = u(rng);
    A(i, i + 1) = A(i + 1, i) = o[i];
  }
  return TridiagonalPencil(d, o, m);
}

}  // namespace

TEST_CASE("pencil eigenvalues agree with a dense generalized solver") {
  Eigen::MatrixXd A, B;
  const auto p = random_pencil(40, 3, A, B);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(A, B);
  for (std::size_t k = 0; k < 40; k += 7) {
    const double lam = p.eigenvalue(k);
    CHECK_THAT(lam, WithinAbs(es.eigenvalues()(k), 1e-10));
    CHECK(p.count_below(lam - 1e-9) == k);
    const auto x = p.eigenvector(lam);
    Eigen::Map<const Eigen::VectorXd> xv(x.data(), 40);
    CHECK((A * xv - lam * B * xv).norm() <= 1e-8);
    CHECK_THAT(xv.dot(B * xv), WithinAbs(1.0, 1e-10));
  }
}

TEST_CASE("shifted solve and plain tridiagonal solve") {
  Eigen::MatrixXd A, B;
  const auto p = random_pencil(25, 11, A, B);
  std::vector<double> rhs(25);
  for (std::size_t i = 0; i < 25; ++i) rhs[i] = std::cos(static_cast<double>(i));
  const double shift = 0.37;
  const auto x = p.solve_shifted(shift, rhs);
  Eigen::Map<const Eigen::VectorXd> xv(x.data(), 25), bv(rhs.data(), 25);
  CHECK(((A - shift * B) * xv - bv).norm() <= 1e-10);
  const auto ax = p.apply(x);
  Eigen::Map<const Eigen::VectorXd> axv(ax.data(), 25);
  CHECK((axv - A * xv).norm() <= 1e-12);

  std::vector<double> lo{1, 2, 3}, di{4, 0.5, 6, 7}, up{1, 1, 2};
  std::vector<double> r{1, 2, 3, 4};
  Eigen::Matrix4d M = Eigen::Matrix4d::Zero();
  for (int i = 0; i < 4; ++i) M(i, i) = di[i];
  for (int i = 0; i < 3; ++i) {
    M(i + 1, i) = lo[i];
    M(i, i + 1) = up[i];
  }
  const auto y = solve_tridiagonal(lo, di, up, r);
  const Eigen::Vector4d yd = M.partialPivLu().solve(Eigen::Vector4d(1, 2, 3, 4));
  for (int i = 0; i < 4; ++i) CHECK_THAT(y[i], WithinAbs(yd(i), 1e-12));
}
