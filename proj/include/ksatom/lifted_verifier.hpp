#pragma once

// The s-channel equations pulled back through the KS map around a nucleus:
// lifted orbitals g(s) = phi(s^2), their residuals in the 4D variable
// s = |y|, and a test for non-analytic s^4 log s content.

#include <cstddef>
#include <vector>

#include "ksatom/ks_transform.hpp"
#include "ksatom/scf.hpp"

namespace ksatom {

struct LiftOptions {
  double window = 0.05;
  std::size_t points = 201;
};

struct LiftedProfile {
  /// Uniform s grid on [0, sqrt(window)].
  RadialProfile g;
  std::size_t orbital = 0;
  std::size_t nucleus = 0;
};

/// g(s) = f(s^2) for the radial function f = u / (r sqrt(4 pi)) of an l = 0
/// orbital given by reduced samples `u`. Values below the first sample are
/// extrapolated. Throws UnsupportedError for l != 0.
LiftedProfile lift_channel(const RadialProfile& u, int l, const LiftOptions& options = {}, std::size_t orbital = 0);

/// Same pullback for samples of f itself.
LiftedProfile lift_profile(const RadialProfile& f, const LiftOptions& options = {});

struct PairResidual {
  std::size_t k = 0;
  std::size_t l = 0;
  double norm = 0.0;
};

struct LiftedReport {
  std::size_t nucleus = 0;
  double window = 0.0;
  /// 4D L2 norms over the ball |y| <= sqrt(window), one per s-channel orbital.
  std::vector<std::size_t> orbitals;
  std::vector<double> orbital_residuals;
  /// -Delta_4 Phi_kl - 16 pi s^2 g_k g_l for every s-channel pair k <= l.
  std::vector<PairResidual> pair_residuals;

  double max_orbital() const;
  double max_pair() const;
};

/// Evaluates both lifted equations on the s grid. Throws PreconditionError
/// for an unconverged result and UnsupportedError for k != 0.
LiftedReport lifted_residual(const ScfResult& result, std::size_t k = 0, const LiftOptions& options = {});

struct SmoothnessReport {
  /// Coefficients of {1, s^2, s^4, s^6, s^4 log s}.
  std::vector<double> coefficients;
  double log_coefficient = 0.0;
  /// |log coefficient| / max(|c_0|, |c_1|, |c_2|, |c_3|)
  double log_relative = 0.0;
  /// Relative L2 misfit of the pure even-power fit {1, s^2, s^4, s^6}.
  double even_residual = 0.0;
};

SmoothnessReport smoothness_check(const LiftedProfile& g);

/// Copy of `result` with each orbital multiplied by 1 + a xi_i e^{-r}
/// (xi_i = +-1 drawn from a seeded mt19937) and renormalized. Convergence
/// flags are kept so the copy can be fed to lifted_residual.
ScfResult perturb_orbitals(const ScfResult& result, double amplitude = 0.01, unsigned seed = 12345);

}  // namespace ksatom
