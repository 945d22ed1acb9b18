#pragma once

// Near-nucleus structure of computed orbitals and densities: the split
// phi = phi1 + r phi2 into even and odd power series, cusp ratios and
// derivative bounds.

#include <cstddef>
#include <vector>

#include "ksatom/ks_transform.hpp"
#include "ksatom/system_model.hpp"

namespace ksatom {

struct FitOptions {
  double window = 0.05;
  int degree = 5;
  /// Relative residual above which the fit is flagged.
  double residual_threshold = 1e-6;
};

/// Fit of u / r^(l+1) = sum_p a_p r^p on [0, window]. Even powers form phi1,
/// odd powers form phi2.
struct CuspDecomposition {
  std::size_t nucleus = 0;
  int l = 0;
  double window = 0.0;
  std::vector<double> coefficients;  // a_0 .. a_degree
  std::vector<double> even;          // a_0, a_2, ...
  std::vector<double> odd;           // a_1, a_3, ...
  /// Weighted L2 misfit relative to the data on the window.
  double residual = 0.0;
  bool poor_fit = false;

  double phi1(double r) const;
  double phi2(double r) const;
  /// phi1(r) + r phi2(r)
  double evaluate(double r) const;
};

/// `u` holds reduced radial samples (r, u(r)). Throws DomainError for
/// degree < 3 or a non-positive window and SizeError when the window holds
/// fewer than degree + 4 samples.
CuspDecomposition extract_decomposition(const RadialProfile& u, int l, const FitOptions& options = {},
                                        std::size_t nucleus = 0);

/// Same fit applied directly to samples f(r) (no division by r^(l+1)).
CuspDecomposition fit_profile(const RadialProfile& f, int l, const FitOptions& options = {},
                              std::size_t nucleus = 0);

/// a_1 / a_0. Throws PreconditionError for l != 0 and DegenerateValueError
/// when |a_0| < 1e-12.
double cusp_ratio(const CuspDecomposition& d);

struct DensityDecomposition {
  CuspDecomposition fit;
  double ratio = 0.0;
};

/// Fits the spherically averaged density around nucleus k. The ratio
/// target for a converged solution is -Z_k. Throws DegenerateValueError on
/// a vanishing density and UnsupportedError for k != 0 (atoms only).
DensityDecomposition density_decomposition(const Density& rho, std::size_t k, const FitOptions& options = {});

struct DerivativeBounds {
  double r_limit = 0.1;
  /// sup |f'| and sup r |f''| over the samples in (0, r_limit].
  double sup_d1 = 0.0;
  double sup_rd2 = 0.0;
  /// Same suprema on the coarse ladder (every second sample, r >= 16 r_0).
  double coarse_sup_d1 = 0.0;
  double coarse_sup_rd2 = 0.0;
  double ratio_d1 = 1.0;
  double ratio_rd2 = 1.0;
  /// sup |f'| <= 2 |f'(r_limit)|
  bool lipschitz = true;
  /// Both suprema finite and both ratios <= 1.2.
  bool stable = true;
};

/// Checks |f'| and r|f''| bounds for the radial function f = u / r^(l+1)
/// built from reduced samples `u`.
DerivativeBounds derivative_bound_check(const RadialProfile& u, int l, std::size_t k = 0, double r_limit = 0.1);

/// Same, for samples of f itself.
DerivativeBounds derivative_bound_check_profile(const RadialProfile& f, double r_limit = 0.1);

}  // namespace ksatom
