#pragma once

// Block Davidson for the generalized channel problem A x = theta B x in the
// w = u/sqrt(r) variables, where A = A_loc (tridiagonal) + a nonlocal part.

#include <functional>
#include <vector>

#include "ksatom/tridiagonal.hpp"

namespace ksatom::detail {

struct ChannelProblem {
  /// Local tridiagonal part and the mass B = diag(r^2).
  const TridiagonalPencil* local = nullptr;
  /// Adds the nonlocal part of A x to out (may be empty).
  std::function<void(const std::vector<double>& x, std::vector<double>& out)> nonlocal;
  /// Level shift sigma (B - B W W^T B) on the complement of `occupied`.
  double shift = 0.0;
  std::vector<std::vector<double>> occupied;  // B-orthonormal
  /// Per-component weights 1/r_i^2 for the residual norm.
  const std::vector<double>* residual_weight = nullptr;
};

struct DavidsonResult {
  std::vector<double> theta;                 // shifted Ritz values
  std::vector<std::vector<double>> vectors;  // B-orthonormal
  std::vector<double> residual;
  int iterations = 0;
};

/// y = A x (including the nonlocal part and the level shift).
std::vector<double> apply_problem(const ChannelProblem& p, const std::vector<double>& x, bool with_shift = true);

/// Lowest `count` eigenpairs. Vector k < tight_count is converged to `tol`,
/// the others to `loose_tol`.
DavidsonResult davidson(const ChannelProblem& p, std::size_t count, std::vector<std::vector<double>> guess,
                        std::size_t tight_count, double tol, double loose_tol, int max_iterations);

}  // namespace ksatom::detail
