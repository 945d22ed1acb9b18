#include "ksatom/tridiagonal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ksatom/errors.hpp"

namespace ksatom {

TridiagonalPencil::TridiagonalPencil(std::vector<double> diag, std::vector<double> off,
                                     std::vector<double> mass)
    : diag_(std::move(diag)), off_(std::move(off)), mass_(std::move(mass)) {
  const std::size_t n = diag_.size();
  if (n == 0 || off_.size() + 1 != n || mass_.size() != n) {
    throw ConsistencyError("TridiagonalPencil: inconsistent sizes");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(diag_[i]) || !(mass_[i] > 0.0) || !std::isfinite(mass_[i])) {
      throw InternalError("TridiagonalPencil: non-finite entry or non-positive mass");
    }
  }
  for (double e : off_) {
    if (!std::isfinite(e)) throw InternalError("TridiagonalPencil: non-finite off-diagonal");
  }
}

std::size_t TridiagonalPencil::count_below(double shift) const {
  // pivots of the LDL^T factorisation of A - shift*B; by Sylvester's law the
  // number of negative pivots equals the number of eigenvalues below shift.
  const std::size_t n = diag_.size();
  constexpr double tiny = std::numeric_limits<double>::min();
  std::size_t count = 0;
  double q = diag_[0] - shift * mass_[0];
  if (q < 0) ++count;
  for (std::size_t i = 1; i < n; ++i) {
    if (q == 0.0) q = tiny;
    q = diag_[i] - shift * mass_[i] - off_[i - 1] * off_[i - 1] / q;
    if (q < 0) ++count;
  }
  return count;
}

double TridiagonalPencil::eigenvalue(std::size_t k) const {
  if (k >= size()) throw SizeError("TridiagonalPencil: eigenvalue index out of range");
  double lo = -1.0;
  while (count_below(lo) > k) lo *= 2.0;
  double hi = 1.0;
  while (count_below(hi) <= k) hi *= 2.0;
  for (int it = 0; it < 2000; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (count_below(mid) > k) {
      hi = mid;
    } else {
      lo = mid;
    }
    if (hi - lo <= 2.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(lo), std::abs(hi))) {
      break;
    }
  }
  return 0.5 * (lo + hi);
}

std::vector<double> TridiagonalPencil::solve_shifted(double shift, std::span<const double> rhs) const {
  const std::size_t n = size();
  if (rhs.size() != n) throw ConsistencyError("solve_shifted: rhs size mismatch");
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = diag_[i] - shift * mass_[i];
  return solve_tridiagonal(off_, std::move(d), off_, std::vector<double>(rhs.begin(), rhs.end()));
}

std::vector<double> TridiagonalPencil::apply(std::span<const double> x) const {
  const std::size_t n = size();
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double v = diag_[i] * x[i];
    if (i > 0) v += off_[i - 1] * x[i - 1];
    if (i + 1 < n) v += off_[i] * x[i + 1];
    y[i] = v;
  }
  return y;
}

std::vector<double> TridiagonalPencil::eigenvector(double lambda) const {
  const std::size_t n = size();
  std::vector<double> x(n);
  // deterministic, non-special start vector
  for (std::size_t i = 0; i < n; ++i) x[i] = 1.0 + 0.25 * std::sin(0.7 * static_cast<double>(i));
  auto b_normalize = [&](std::vector<double>& v) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += mass_[i] * v[i] * v[i];
    s = std::sqrt(s);
    for (double& c : v) c /= s;
  };
  for (int it = 0; it < 4; ++it) {
    std::vector<double> bx(n);
    for (std::size_t i = 0; i < n; ++i) bx[i] = mass_[i] * x[i];
    x = solve_shifted(lambda, bx);
    b_normalize(x);
  }
  double amax = 0.0;
  for (double c : x) amax = std::max(amax, std::abs(c));
  for (double c : x) {
    if (std::abs(c) > 1e-12 * amax) {
      if (c < 0) {
        for (double& v : x) v = -v;
      }
      break;
    }
  }
  return x;
}

std::vector<double> solve_tridiagonal(std::vector<double> dl, std::vector<double> d,
                                      std::vector<double> du, std::vector<double> b) {
  const std::size_t n = d.size();
  if (n == 0) return b;
  if (dl.size() + 1 != n || du.size() + 1 != n || b.size() != n) {
    throw ConsistencyError("solve_tridiagonal: inconsistent sizes");
  }
  constexpr double tiny = 1e-300;
  if (n == 1) {
    b[0] /= (d[0] == 0.0 ? tiny : d[0]);
    return b;
  }
  // dl is reused to hold the second superdiagonal created by row swaps.
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (std::abs(d[i]) >= std::abs(dl[i])) {
      if (d[i] == 0.0) d[i] = tiny;
      const double fact = dl[i] / d[i];
      d[i + 1] -= fact * du[i];
      b[i + 1] -= fact * b[i];
      dl[i] = 0.0;
    } else {
      const double fact = d[i] / dl[i];
      d[i] = dl[i];
      const double temp = d[i + 1];
      d[i + 1] = du[i] - fact * temp;
      if (i + 2 < n) {
        dl[i] = du[i + 1];
        du[i + 1] = -fact * dl[i];
      } else {
        dl[i] = 0.0;
      }
      du[i] = temp;
      const double tb = b[i];
      b[i] = b[i + 1];
      b[i + 1] = tb - fact * b[i + 1];
    }
  }
  if (d[n - 1] == 0.0) d[n - 1] = tiny;
  b[n - 1] /= d[n - 1];
  b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
  for (std::size_t k = n - 2; k-- > 0;) {
    b[k] = (b[k] - du[k] * b[k + 1] - dl[k] * b[k + 2]) / d[k];
  }
  return b;
}

}  // namespace ksatom
