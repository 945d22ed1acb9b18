#pragma once

// Run orchestration behind the ksatom tool: JSON configuration, solve /
// analyze / verify stages writing report.json plus CSV tables, and the KS
// self-test.

#include <filesystem>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "ksatom/cusp_analysis.hpp"
#include "ksatom/lifted_verifier.hpp"
#include "ksatom/scf.hpp"

namespace ksatom {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode { exit_ok = 0, exit_config = 1, exit_nonconvergence = 2, exit_verification = 3 };

struct RunConfig {
  std::vector<Nucleus> nuclei;
  int electrons = 1;
  int orbitals = 1;
  std::vector<double> ci_coefficients;  // empty: first configuration
  SolverConfig solver;
  FitOptions fit;
  LiftOptions lift;
  std::string output = "out";

  /// Cross-field checks; throws ConfigError naming the field.
  void validate() const;
  ElectronicModel model() const;
  /// Halves the log step `times` times.
  RunConfig refined(int times) const;
};

/// Throws ConfigError with a field path for schema violations.
RunConfig parse_config(const nlohmann::json& j);
/// Throws IoError for unreadable files and ConfigError (with the parse
/// location) for malformed JSON.
RunConfig load_config(const std::filesystem::path& path);
/// Fully resolved configuration including defaults.
nlohmann::json to_json(const RunConfig& cfg);

struct StageOutcome {
  int exit_code = exit_ok;
  std::string message;
  nlohmann::json report;
};

/// Solves and writes report.json, orbitals.csv, density.csv and
/// iterations.csv into `out_dir`.
StageOutcome run_solve(const RunConfig& cfg, const std::filesystem::path& out_dir);

/// Reads the artifacts of run_solve and rebuilds the result. Throws IoError
/// for missing files and ConsistencyError for artifacts that disagree.
ScfResult load_result(const std::filesystem::path& out_dir, RunConfig* cfg_out = nullptr);

/// Cusp / density / derivative-bound analysis appended to report.json.
StageOutcome run_analyze(const std::filesystem::path& out_dir);

/// Lifted residuals, perturbation contrast and smoothness appended to
/// report.json. Exit 3 when a check fails, 2 for an unconverged artifact.
StageOutcome run_verify(const std::filesystem::path& out_dir);

struct SelftestOptions {
  std::size_t points = 100000;
  unsigned seed = 2024;
  /// Harness hook: flips one sign in the map under test.
  bool inject_sign_error = false;
};

struct SelftestCheck {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double tolerance = 0.0;
};

std::vector<SelftestCheck> ks_selftest(const SelftestOptions& options = {});

/// Orbitals and derived tables written with 17 significant digits.
void write_orbitals_csv(const ScfResult& r, const std::filesystem::path& path);
void write_density_csv(const ScfResult& r, const std::filesystem::path& path);
void write_iterations_csv(const ScfResult& r, const std::filesystem::path& path);

}  // namespace ksatom
