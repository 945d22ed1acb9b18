#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ksatom {

/// Symmetric-definite pencil (A, B) with A symmetric tridiagonal and B
/// diagonal positive. Eigenvalues A x = lambda B x are found by Sturm-count
/// bisection on A - lambda B, eigenvectors by inverse iteration. Working on
/// the pencil avoids forming B^{-1/2} A B^{-1/2}, whose entries span many
/// orders of magnitude on a logarithmic radial grid.
class TridiagonalPencil {
 public:
  TridiagonalPencil(std::vector<double> diag, std::vector<double> off, std::vector<double> mass);

  std::size_t size() const { return diag_.size(); }
  std::span<const double> diag() const { return diag_; }
  std::span<const double> off() const { return off_; }
  std::span<const double> mass() const { return mass_; }

  /// Number of eigenvalues strictly below `shift`.
  std::size_t count_below(double shift) const;

  /// k-th eigenvalue (0-based, ascending).
  double eigenvalue(std::size_t k) const;

  /// B-normalized eigenvector for an (accurate) eigenvalue. Sign fixed so the
  /// first component of magnitude above 1e-12 * max is positive.
  std::vector<double> eigenvector(double lambda) const;

  /// Solves (A - shift B) x = rhs with partial pivoting.
  std::vector<double> solve_shifted(double shift, std::span<const double> rhs) const;

  /// y = A x
  std::vector<double> apply(std::span<const double> x) const;

 private:
  std::vector<double> diag_;
  std::vector<double> off_;
  std::vector<double> mass_;
};

/// General tridiagonal solve with partial pivoting (LAPACK gtsv scheme).
/// `lower`, `diag`, `upper` and `rhs` are consumed.
std::vector<double> solve_tridiagonal(std::vector<double> lower, std::vector<double> diag,
                                      std::vector<double> upper, std::vector<double> rhs);

}  // namespace ksatom
