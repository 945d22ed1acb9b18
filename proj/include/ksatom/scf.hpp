#pragma once

// Self-consistent solvers for atoms: Hartree, Hartree-Fock and MCSCF, all in
// the central-field form where every orbital lives in one (l, m) channel.

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "ksatom/radial.hpp"
#include "ksatom/system_model.hpp"

namespace ksatom {

enum class Mode { hartree, hartree_fock, mcscf };

std::string to_string(Mode m);
/// Throws ConfigError for unknown names.
Mode mode_from_string(const std::string& s);

struct SolverConfig {
  Mode mode = Mode::hartree_fock;
  int max_iterations = 300;
  double energy_tolerance = 1e-8;
  double residual_tolerance = 1e-6;
  double damping = 0.3;
  double level_shift = 0.5;
  int l_max = 2;
  std::size_t grid_points = 4000;
  double r_min = 1e-5;
  double r_max = 40.0;
  /// Fixed channel per orbital; empty means Aufbau on the bare nucleus.
  std::vector<Channel> orbital_channels;

  /// Throws ConfigError naming the offending field.
  void validate() const;
  RadialGrid grid() const { return RadialGrid(grid_points, r_min, r_max); }
};

struct IterationRecord {
  int iteration = 0;
  double energy = 0.0;
  double residual = 0.0;
};

struct ScfResult {
  Mode mode = Mode::hartree_fock;
  ElectronicModel model;
  OrbitalSet orbitals;
  /// Orbital energies: eps_i for Hartree/HF (ascending), lambda_ii / gamma_i for MCSCF.
  std::vector<double> eigenvalues;
  Eigen::MatrixXd multipliers;
  ConfigurationSet configuration;
  std::vector<IterationRecord> history;
  double energy = 0.0;
  double residual = 0.0;
  bool converged = false;
  /// Energy sequence non-increasing after the first step (1e-9 slack).
  bool monotone = true;
  /// HF only: occupied eps are the N lowest of the final operator.
  bool aufbau_consistent = true;
};

/// sum_j w_j sum_lambda C^lambda(tt; jj) Y^lambda[u_j^2]: the direct potential
/// seen by an orbital in channel `target`.
std::vector<double> build_direct(const OrbitalSet& orbitals, const std::vector<double>& weights,
                                 Channel target = {}, const AngularCoupling* angular = nullptr);

/// sum_j w_j sum_lambda C^lambda(tj; jt) Y^lambda[u_j u] u_j for u in channel
/// target.channel.
std::vector<double> build_exchange(const OrbitalSet& orbitals, const std::vector<double>& weights,
                                   const Orbital& target, const AngularCoupling* angular = nullptr);

/// HF functional of a single determinant built from the orbitals.
double hf_energy(const OrbitalSet& orbitals, double nuclear_charge);

/// Hartree product-state energy sum h_ii + sum_{i<j} J_ij (orbitals need not be orthogonal).
double hartree_energy(const OrbitalSet& orbitals, double nuclear_charge);

/// Runs the solver selected by config.mode and returns the last iterate even
/// when it did not converge.
ScfResult solve(const ElectronicModel& model, const SolverConfig& config,
                const std::optional<ConfigurationSet>& cs_init = std::nullopt);

/// The three drivers throw ConvergenceError (with the residual history)
/// when max_iterations is reached and PreconditionError when config.mode or
/// the orbital count does not fit.
ScfResult hf_scf(const ElectronicModel& model, const SolverConfig& config);
ScfResult hartree_scf(const ElectronicModel& model, const SolverConfig& config);
/// M <= 4; larger M throws UnsupportedError.
ScfResult mcscf_solve(const ElectronicModel& model, const ConfigurationSet& cs_init, const SolverConfig& config);

/// L2 norms of
///   gamma-weighted (-Delta + V) phi_i + sum A_ijkl phi_kl phi_j - sum lambda_ij phi_j
/// with 4th-order stencils (for Hartree: the Hartree equations).
std::vector<double> assemble_augmented_residual(const ScfResult& result);

/// Orthonormal u_i' = sum_j U_ji u_j for orbitals sharing one channel.
OrbitalSet rotate_orbitals(const OrbitalSet& orbitals, const Eigen::MatrixXd& U);

/// Hilbert-Schmidt distance of the occupied projectors sum_i |phi_i><phi_i|.
double projector_distance(const OrbitalSet& a, const OrbitalSet& b);

}  // namespace ksatom
