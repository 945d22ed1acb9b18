#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>

#include "ksatom/errors.hpp"
#include "ksatom/run.hpp"

namespace fs = std::filesystem;
using namespace ksatom;

namespace {

int report(const StageOutcome& o) {
  std::fprintf(o.exit_code == exit_ok ? stdout : stderr, "%s\n", o.message.c_str());
  return o.exit_code;
}

fs::path artifact_dir(const std::string& out, const std::string& positional) {
  const std::string p = positional.empty() ? out : positional;
  if (p.empty()) throw ConfigError("--out", "artifact directory or report path required");
  return p;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hartree, Hartree-Fock and MCSCF atoms on radial grids, with cusp and KS-lift checks"};
  app.name("ksatom");
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(0, 1);

  std::string config_path;
  std::string out_dir;
  std::string artifact;
  int refine = 0;

  auto* solve = app.add_subcommand("solve", "run the configured SCF solve and write report.json and CSV tables");
  solve->add_option("--config", config_path, "JSON configuration")->required();
  solve->add_option("--out", out_dir, "output directory (default: config 'output')");
  solve->add_option("--grid-refine", refine, "halve the log step K times")->check(CLI::NonNegativeNumber);

  auto* analyze = app.add_subcommand("analyze", "cusp, density and derivative-bound analysis of a solve artifact");
  analyze->add_option("--out", out_dir, "artifact directory");
  analyze->add_option("path", artifact, "artifact directory or report.json");

  auto* verify = app.add_subcommand("verify", "lifted-equation residuals and smoothness of a solve artifact");
  verify->add_option("--out", out_dir, "artifact directory");
  verify->add_option("path", artifact, "artifact directory or report.json");

  SelftestOptions st;
  auto* selftest = app.add_subcommand("ks-selftest", "property checks of the KS transform");
  selftest->add_option("--points", st.points, "random sample count")->check(CLI::PositiveNumber);
  selftest->add_option("--seed", st.seed, "RNG seed");
  selftest->add_flag("--inject-sign-error", st.inject_sign_error, "flip a sign in the map (harness check)");

  if (argc <= 1) {
    std::cout << app.help();
    return exit_ok;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? exit_ok : exit_config;
  }
  if (app.get_subcommands().empty()) {
    std::cout << app.help();
    return exit_ok;
  }

  try {
    if (solve->parsed()) {
      RunConfig cfg = load_config(config_path).refined(refine);
      return report(run_solve(cfg, out_dir.empty() ? fs::path(cfg.output) : fs::path(out_dir)));
    }
    if (analyze->parsed()) return report(run_analyze(artifact_dir(out_dir, artifact)));
    if (verify->parsed()) return report(run_verify(artifact_dir(out_dir, artifact)));
    if (selftest->parsed()) {
      bool ok = true;
      for (const auto& c : ks_selftest(st)) {
        std::printf("%s  %-36s %.3e (tol %.0e)\n", c.passed ? "PASS" : "FAIL", c.name.c_str(), c.value, c.tolerance);
        ok = ok && c.passed;
      }
      return ok ? exit_ok : exit_verification;
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return exit_config;
  } catch (const ConsistencyError& e) {
    std::fprintf(stderr, "inconsistent artifact: %s\n", e.what());
    return exit_config;
  } catch (const IoError& e) {
    std::fprintf(stderr, "I/O error: %s\n", e.what());
    return exit_config;
  } catch (const ConvergenceError& e) {
    std::fprintf(stderr, "no convergence: %s\n", e.what());
    return exit_nonconvergence;
  } catch (const PreconditionError& e) {
    std::fprintf(stderr, "precondition failed: %s\n", e.what());
    return exit_nonconvergence;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_verification;
  }
  return exit_ok;
}
