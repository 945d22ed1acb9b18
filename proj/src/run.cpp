#include "ksatom/run.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "ksatom/errors.hpp"
#include "ksatom/ks_transform.hpp"

namespace ksatom {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kLiftedTolerance = 1e-5;
constexpr double kPerturbationContrast = 10.0;
constexpr double kLogTolerance = 1e-3;
constexpr double kCuspTolerance = 0.01;

void check_keys(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* k) { return it.key() == k; })) {
      throw ConfigError(path.empty() ? it.key() : path + "." + it.key(), "unknown field");
    }
  }
}

double get_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(path, "must be finite");
  return v;
}

long long get_integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ConfigError(path, "expected an integer");
  return j.get<long long>();
}

template <class F>
void optional_field(const json& obj, const char* key, const std::string& path, F&& f) {
  if (auto it = obj.find(key); it != obj.end()) f(*it, path + "." + key);
}

std::string format17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json(const fs::path& path) {
  const std::string text = read_text(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + " at byte " + std::to_string(e.byte), "malformed JSON");
  }
}

void write_report(const fs::path& dir, const json& report) { write_text(dir / "report.json", report.dump(2) + "\n"); }

std::string orbital_label(std::size_t i, Channel c) {
  return "u" + std::to_string(i) + "_l" + std::to_string(c.l) + "_m" + std::to_string(c.m);
}

double nuclear_charge(const ScfResult& r) { return r.model.frame[0].charge; }

}  // namespace

void RunConfig::validate() const {
  if (nuclei.empty()) throw ConfigError("system.nuclei", "at least one nucleus is required");
  const ElectronicModel m = model();
  (void)m;
  if (solver.grid_points < 64) throw ConfigError("grid.points", "must be >= 64");
  if (!(solver.r_min > 0.0)) throw ConfigError("grid.r_min", "must be positive");
  if (!(solver.r_max > solver.r_min)) throw ConfigError("grid.r_max", "must exceed grid.r_min");
  solver.validate();
  if (solver.mode != Mode::mcscf && orbitals != electrons) {
    throw ConfigError("system.orbitals", "must equal system.electrons outside mcscf mode");
  }
  if (solver.mode == Mode::mcscf && orbitals > 4) throw ConfigError("system.orbitals", "mcscf supports at most 4");
  if (!solver.orbital_channels.empty() && static_cast<int>(solver.orbital_channels.size()) != orbitals) {
    throw ConfigError("system.orbital_channels", "needs one channel per orbital");
  }
  if (!ci_coefficients.empty()) {
    if (solver.mode != Mode::mcscf) throw ConfigError("system.ci_coefficients", "only used in mcscf mode");
    try {
      ConfigurationSet cs(electrons, orbitals, ci_coefficients);
    } catch (const ConsistencyError& e) {
      throw ConfigError("system.ci_coefficients", e.what());
    }
  }
  if (fit.degree < 3) throw ConfigError("analysis.degree", "must be >= 3");
  if (!(fit.window > 0.0)) throw ConfigError("analysis.window", "must be positive");
  if (!(fit.residual_threshold > 0.0)) throw ConfigError("analysis.residual_threshold", "must be positive");
  if (lift.points < 8) throw ConfigError("analysis.lift_points", "must be >= 8");
  if (!(lift.window > 0.0)) throw ConfigError("analysis.lift_window", "must be positive");
}

ElectronicModel RunConfig::model() const { return ElectronicModel(electrons, orbitals, NuclearFrame(nuclei)); }

RunConfig RunConfig::refined(int times) const {
  if (times < 0) throw ConfigError("--grid-refine", "must be >= 0");
  RunConfig c = *this;
  c.solver.grid_points = (solver.grid_points - 1) * (std::size_t{1} << times) + 1;
  return c;
}

RunConfig parse_config(const json& j) {
  check_keys(j, "", {"system", "grid", "solver", "analysis", "output"});
  RunConfig c;
  const auto sys_it = j.find("system");
  if (sys_it == j.end()) throw ConfigError("system", "required");
  const json& sys = *sys_it;
  check_keys(sys, "system", {"nuclei", "electrons", "orbitals", "mode", "orbital_channels", "ci_coefficients"});

  const auto nuc_it = sys.find("nuclei");
  if (nuc_it == sys.end() || !nuc_it->is_array()) throw ConfigError("system.nuclei", "required array");
  for (std::size_t k = 0; k < nuc_it->size(); ++k) {
    const std::string path = "system.nuclei[" + std::to_string(k) + "]";
    const json& n = (*nuc_it)[k];
    check_keys(n, path, {"position", "charge"});
    Nucleus nu;
    if (auto p = n.find("position"); p != n.end()) {
      if (!p->is_array() || p->size() != 3) throw ConfigError(path + ".position", "expected 3 numbers");
      for (std::size_t a = 0; a < 3; ++a) {
        nu.position.x[a] = get_number((*p)[a], path + ".position[" + std::to_string(a) + "]");
      }
    }
    const auto q = n.find("charge");
    if (q == n.end()) throw ConfigError(path + ".charge", "required");
    nu.charge = get_number(*q, path + ".charge");
    c.nuclei.push_back(nu);
  }
  const auto e_it = sys.find("electrons");
  if (e_it == sys.end()) throw ConfigError("system.electrons", "required");
  c.electrons = static_cast<int>(get_integer(*e_it, "system.electrons"));
  c.orbitals = c.electrons;
  optional_field(sys, "orbitals", "system", [&](const json& v, const std::string& p) {
    c.orbitals = static_cast<int>(get_integer(v, p));
  });
  optional_field(sys, "mode", "system", [&](const json& v, const std::string& p) {
    if (!v.is_string()) throw ConfigError(p, "expected a string");
    c.solver.mode = mode_from_string(v.get<std::string>());
  });
  optional_field(sys, "orbital_channels", "system", [&](const json& v, const std::string& p) {
    if (!v.is_array()) throw ConfigError(p, "expected an array of [l, m] pairs");
    for (std::size_t i = 0; i < v.size(); ++i) {
      const std::string pi = p + "[" + std::to_string(i) + "]";
      if (!v[i].is_array() || v[i].size() != 2) throw ConfigError(pi, "expected [l, m]");
      c.solver.orbital_channels.push_back(
          {static_cast<int>(get_integer(v[i][0], pi + "[0]")), static_cast<int>(get_integer(v[i][1], pi + "[1]"))});
    }
  });
  optional_field(sys, "ci_coefficients", "system", [&](const json& v, const std::string& p) {
    if (!v.is_array()) throw ConfigError(p, "expected an array of numbers");
    for (std::size_t i = 0; i < v.size(); ++i) c.ci_coefficients.push_back(get_number(v[i], p + "[" + std::to_string(i) + "]"));
  });

  if (auto g = j.find("grid"); g != j.end()) {
    check_keys(*g, "grid", {"points", "r_min", "r_max", "l_max"});
    optional_field(*g, "points", "grid", [&](const json& v, const std::string& p) {
      const long long n = get_integer(v, p);
      if (n < 64) throw ConfigError(p, "must be >= 64");
      c.solver.grid_points = static_cast<std::size_t>(n);
    });
    optional_field(*g, "r_min", "grid", [&](const json& v, const std::string& p) { c.solver.r_min = get_number(v, p); });
    optional_field(*g, "r_max", "grid", [&](const json& v, const std::string& p) { c.solver.r_max = get_number(v, p); });
    optional_field(*g, "l_max", "grid", [&](const json& v, const std::string& p) {
      c.solver.l_max = static_cast<int>(get_integer(v, p));
    });
  }
  if (auto s = j.find("solver"); s != j.end()) {
    check_keys(*s, "solver", {"max_iterations", "energy_tolerance", "residual_tolerance", "damping", "level_shift"});
    optional_field(*s, "max_iterations", "solver", [&](const json& v, const std::string& p) {
      c.solver.max_iterations = static_cast<int>(get_integer(v, p));
    });
    optional_field(*s, "energy_tolerance", "solver",
                   [&](const json& v, const std::string& p) { c.solver.energy_tolerance = get_number(v, p); });
    optional_field(*s, "residual_tolerance", "solver",
                   [&](const json& v, const std::string& p) { c.solver.residual_tolerance = get_number(v, p); });
    optional_field(*s, "damping", "solver", [&](const json& v, const std::string& p) { c.solver.damping = get_number(v, p); });
    optional_field(*s, "level_shift", "solver",
                   [&](const json& v, const std::string& p) { c.solver.level_shift = get_number(v, p); });
  }
  if (auto a = j.find("analysis"); a != j.end()) {
    check_keys(*a, "analysis", {"window", "degree", "residual_threshold", "lift_window", "lift_points"});
    optional_field(*a, "window", "analysis", [&](const json& v, const std::string& p) { c.fit.window = get_number(v, p); });
    optional_field(*a, "degree", "analysis", [&](const json& v, const std::string& p) {
      c.fit.degree = static_cast<int>(get_integer(v, p));
    });
    optional_field(*a, "residual_threshold", "analysis",
                   [&](const json& v, const std::string& p) { c.fit.residual_threshold = get_number(v, p); });
    optional_field(*a, "lift_window", "analysis",
                   [&](const json& v, const std::string& p) { c.lift.window = get_number(v, p); });
    optional_field(*a, "lift_points", "analysis", [&](const json& v, const std::string& p) {
      const long long n = get_integer(v, p);
      if (n < 8) throw ConfigError(p, "must be >= 8");
      c.lift.points = static_cast<std::size_t>(n);
    });
  }
  if (auto o = j.find("output"); o != j.end()) {
    if (!o->is_string()) throw ConfigError("output", "expected a string");
    c.output = o->get<std::string>();
  }
  c.validate();
  return c;
}

RunConfig load_config(const fs::path& path) {
  if (!fs::exists(path)) throw IoError("config file not found: " + path.string());
  return parse_config(read_json(path));
}

json to_json(const RunConfig& c) {
  json nuclei = json::array();
  for (const auto& n : c.nuclei) {
    nuclei.push_back({{"position", {n.position.x[0], n.position.x[1], n.position.x[2]}}, {"charge", n.charge}});
  }
  json channels = json::array();
  for (Channel ch : c.solver.orbital_channels) channels.push_back({ch.l, ch.m});
  json sys = {{"nuclei", nuclei},
              {"electrons", c.electrons},
              {"orbitals", c.orbitals},
              {"mode", to_string(c.solver.mode)},
              {"orbital_channels", channels},
              {"ci_coefficients", c.ci_coefficients}};
  return {{"system", sys},
          {"grid",
           {{"points", c.solver.grid_points},
            {"r_min", c.solver.r_min},
            {"r_max", c.solver.r_max},
            {"l_max", c.solver.l_max}}},
          {"solver",
           {{"max_iterations", c.solver.max_iterations},
            {"energy_tolerance", c.solver.energy_tolerance},
            {"residual_tolerance", c.solver.residual_tolerance},
            {"damping", c.solver.damping},
            {"level_shift", c.solver.level_shift}}},
          {"analysis",
           {{"window", c.fit.window},
            {"degree", c.fit.degree},
            {"residual_threshold", c.fit.residual_threshold},
            {"lift_window", c.lift.window},
            {"lift_points", c.lift.points}}},
          {"output", c.output}};
}

void write_orbitals_csv(const ScfResult& r, const fs::path& path) {
  std::string out = "r";
  for (std::size_t i = 0; i < r.orbitals.size(); ++i) out += "," + orbital_label(i, r.orbitals[i].channel);
  out += "\n";
  const auto& grid = r.orbitals.grid();
  for (std::size_t t = 0; t < grid.size(); ++t) {
    out += format17(grid.r(t));
    for (std::size_t i = 0; i < r.orbitals.size(); ++i) out += "," + format17(r.orbitals[i].u[t]);
    out += "\n";
  }
  write_text(path, out);
}

void write_density_csv(const ScfResult& r, const fs::path& path) {
  const Density d = density(r.orbitals, r.configuration);
  std::string out = "r,rho\n";
  for (std::size_t t = 0; t < d.rho.size(); ++t) out += format17(d.rho.radius(t)) + "," + format17(d.rho.value(t)) + "\n";
  write_text(path, out);
}

void write_iterations_csv(const ScfResult& r, const fs::path& path) {
  std::string out = "iteration,energy,residual\n";
  for (const auto& h : r.history) {
    out += std::to_string(h.iteration) + "," + format17(h.energy) + "," + format17(h.residual) + "\n";
  }
  write_text(path, out);
}

StageOutcome run_solve(const RunConfig& cfg, const fs::path& out_dir) {
  cfg.validate();
  const ElectronicModel model = cfg.model();
  std::optional<ConfigurationSet> cs;
  if (cfg.solver.mode == Mode::mcscf) {
    cs = cfg.ci_coefficients.empty() ? ConfigurationSet(cfg.electrons, cfg.orbitals)
                                     : ConfigurationSet(cfg.electrons, cfg.orbitals, cfg.ci_coefficients);
  }
  const ScfResult r = solve(model, cfg.solver, cs);

  json orbitals = json::array();
  for (std::size_t i = 0; i < r.orbitals.size(); ++i) {
    orbitals.push_back({{"index", i},
                        {"l", r.orbitals[i].channel.l},
                        {"m", r.orbitals[i].channel.m},
                        {"eigenvalue", finite_or_null(r.eigenvalues[i])}});
  }
  json multipliers = json::array();
  for (Eigen::Index i = 0; i < r.multipliers.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < r.multipliers.cols(); ++j) row.push_back(finite_or_null(r.multipliers(i, j)));
    multipliers.push_back(row);
  }
  json history = json::array();
  for (const auto& h : r.history) {
    history.push_back({{"iteration", h.iteration}, {"energy", finite_or_null(h.energy)}, {"residual", finite_or_null(h.residual)}});
  }
  json augmented = json::array();
  for (double a : assemble_augmented_residual(r)) augmented.push_back(finite_or_null(a));
  json report = {{"version", kVersion},
                 {"config", to_json(cfg)},
                 {"result",
                  {{"mode", to_string(r.mode)},
                   {"converged", r.converged},
                   {"energy", finite_or_null(r.energy)},
                   {"residual", finite_or_null(r.residual)},
                   {"monotone", r.monotone},
                   {"aufbau_consistent", r.aufbau_consistent},
                   {"orbitals", orbitals},
                   {"multipliers", multipliers},
                   {"configuration",
                    {{"configs", r.configuration.configs()}, {"coefficients", r.configuration.coefficients()}}},
                   {"occupations", occupations(r.configuration)},
                   {"augmented_residuals", augmented},
                   {"history", history}}}};

  fs::create_directories(out_dir);
  write_report(out_dir, report);
  write_orbitals_csv(r, out_dir / "orbitals.csv");
  write_density_csv(r, out_dir / "density.csv");
  write_iterations_csv(r, out_dir / "iterations.csv");

  StageOutcome out;
  out.report = report;
  if (r.converged) {
    out.message = "converged: E = " + format17(r.energy);
  } else {
    out.exit_code = exit_nonconvergence;
    out.message = "no convergence after " + std::to_string(r.history.size()) + " iterations; residual history:";
    const std::size_t from = r.history.size() > 10 ? r.history.size() - 10 : 0;
    for (std::size_t i = from; i < r.history.size(); ++i) out.message += " " + format17(r.history[i].residual);
  }
  return out;
}

ScfResult load_result(const fs::path& out_dir, RunConfig* cfg_out) {
  const fs::path report_path = fs::is_directory(out_dir) ? out_dir / "report.json" : out_dir;
  const fs::path dir = report_path.parent_path();
  if (!fs::exists(report_path)) throw IoError("report not found: " + report_path.string());
  const json report = read_json(report_path);
  if (!report.contains("config") || !report.contains("result")) throw ConsistencyError("report.json lacks config or result");
  const RunConfig cfg = parse_config(report["config"]);
  if (cfg_out) *cfg_out = cfg;
  const json& res = report["result"];

  const fs::path orb_path = dir / "orbitals.csv";
  if (!fs::exists(orb_path)) throw IoError("orbitals artifact not found: " + orb_path.string());
  std::istringstream in(read_text(orb_path));
  std::string line;
  std::getline(in, line);
  const std::size_t columns = static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
  const std::size_t m = static_cast<std::size_t>(cfg.orbitals);
  if (columns != m + 1) throw ConsistencyError("orbitals.csv: expected " + std::to_string(m + 1) + " columns");
  std::vector<double> radii;
  std::vector<std::vector<double>> u(m);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    std::vector<double> vals;
    while (std::getline(row, cell, ',')) vals.push_back(std::strtod(cell.c_str(), nullptr));
    if (vals.size() != columns) throw ConsistencyError("orbitals.csv: ragged row");
    radii.push_back(vals[0]);
    for (std::size_t i = 0; i < m; ++i) u[i].push_back(vals[i + 1]);
  }
  const RadialGrid grid = cfg.solver.grid();
  if (radii.size() != grid.size()) throw ConsistencyError("orbitals.csv: row count does not match the grid");
  for (std::size_t t = 0; t < radii.size(); ++t) {
    if (std::abs(radii[t] - grid.r(t)) > 1e-12 * grid.r(t)) throw ConsistencyError("orbitals.csv: radii do not match the grid");
  }

  ScfResult r;
  r.mode = mode_from_string(res.at("mode").get<std::string>());
  r.model = cfg.model();
  std::vector<Orbital> orbs;
  const json& od = res.at("orbitals");
  for (std::size_t i = 0; i < m; ++i) {
    orbs.push_back({{od[i].at("l").get<int>(), od[i].at("m").get<int>()}, std::move(u[i])});
    r.eigenvalues.push_back(od[i].at("eigenvalue").is_null() ? NAN : od[i].at("eigenvalue").get<double>());
  }
  r.orbitals = OrbitalSet(grid, std::move(orbs));
  r.multipliers = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  const json& mult = res.at("multipliers");
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      r.multipliers(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = mult[i][j].get<double>();
    }
  }
  r.configuration = ConfigurationSet(cfg.electrons, cfg.orbitals,
                                     res.at("configuration").at("coefficients").get<std::vector<double>>());
  for (const auto& h : res.at("history")) {
    r.history.push_back({h.at("iteration").get<int>(), h.at("energy").get<double>(), h.at("residual").get<double>()});
  }
  r.energy = res.at("energy").get<double>();
  r.residual = res.at("residual").get<double>();
  r.converged = res.at("converged").get<bool>();
  r.monotone = res.at("monotone").get<bool>();
  r.aufbau_consistent = res.at("aufbau_consistent").get<bool>();
  return r;
}

StageOutcome run_analyze(const fs::path& out_dir) {
  RunConfig cfg;
  const ScfResult r = load_result(out_dir, &cfg);
  const fs::path dir = fs::is_directory(out_dir) ? out_dir : out_dir.parent_path();
  json report = read_json(dir / "report.json");
  const double z = nuclear_charge(r);
  const auto& grid = r.orbitals.grid();
  const std::vector<double> radii(grid.radii().begin(), grid.radii().end());

  bool ok = true;
  json per_orbital = json::array();
  for (std::size_t i = 0; i < r.orbitals.size(); ++i) {
    const int l = r.orbitals[i].channel.l;
    const RadialProfile u(radii, r.orbitals[i].u);
    json entry = {{"orbital", i}, {"nucleus", 0}, {"l", l}};
    try {
      const CuspDecomposition d = extract_decomposition(u, l, cfg.fit);
      entry["coefficients"] = d.coefficients;
      entry["phi1"] = d.even;
      entry["phi2"] = d.odd;
      entry["window"] = d.window;
      entry["fit_residual"] = d.residual;
      entry["poor_fit"] = d.poor_fit;
      ok = ok && !d.poor_fit;
      if (l == 0) {
        const double ratio = cusp_ratio(d);
        const bool pass = std::abs(ratio + z / 2) <= kCuspTolerance * z / 2;
        entry["cusp_ratio"] = ratio;
        entry["cusp_target"] = -z / 2;
        entry["cusp_ok"] = pass;
        ok = ok && pass;
      }
      const DerivativeBounds b = derivative_bound_check(u, l);
      entry["derivative_bounds"] = {{"r_limit", b.r_limit},
                                    {"sup_d1", finite_or_null(b.sup_d1)},
                                    {"sup_r_d2", finite_or_null(b.sup_rd2)},
                                    {"ratio_d1", finite_or_null(b.ratio_d1)},
                                    {"ratio_r_d2", finite_or_null(b.ratio_rd2)},
                                    {"lipschitz", b.lipschitz},
                                    {"stable", b.stable}};
      ok = ok && b.stable;
    } catch (const Error& e) {
      entry["error"] = e.what();
      ok = false;
    }
    per_orbital.push_back(entry);
  }
  json dens;
  try {
    const DensityDecomposition dd = density_decomposition(density(r.orbitals, r.configuration), 0, cfg.fit);
    const bool pass = std::abs(dd.ratio + z) <= kCuspTolerance * z;
    dens = {{"coefficients", dd.fit.coefficients},
            {"rho1", dd.fit.even},
            {"rho2", dd.fit.odd},
            {"fit_residual", dd.fit.residual},
            {"ratio", dd.ratio},
            {"target", -z},
            {"ok", pass}};
    ok = ok && pass;
  } catch (const Error& e) {
    dens = {{"error", e.what()}};
    ok = false;
  }
  report["analysis"] = {{"orbitals", per_orbital}, {"density", dens}, {"passed", ok}};
  write_report(dir, report);
  return {ok ? exit_ok : exit_verification, ok ? "analysis passed" : "analysis found failing checks", report};
}

StageOutcome run_verify(const fs::path& out_dir) {
  RunConfig cfg;
  const ScfResult r = load_result(out_dir, &cfg);
  const fs::path dir = fs::is_directory(out_dir) ? out_dir : out_dir.parent_path();
  if (!r.converged) {
    return {exit_nonconvergence, "verify: precondition failed, the artifact is not converged", {}};
  }
  json report = read_json(dir / "report.json");
  const LiftedReport base = lifted_residual(r, 0, cfg.lift);
  const LiftedReport pert = lifted_residual(perturb_orbitals(r), 0, cfg.lift);
  bool ok = true;
  json orbitals = json::array();
  for (std::size_t q = 0; q < base.orbitals.size(); ++q) {
    const std::size_t i = base.orbitals[q];
    const double res = base.orbital_residuals[q];
    const double contrast = pert.orbital_residuals[q] / std::max(res, 1e-300);
    const auto& grid = r.orbitals.grid();
    const LiftedProfile g =
        lift_channel(RadialProfile({grid.radii().begin(), grid.radii().end()}, r.orbitals[i].u), 0, cfg.lift, i);
    const SmoothnessReport sm = smoothness_check(g);
    const bool pass = res <= kLiftedTolerance && contrast >= kPerturbationContrast && sm.log_relative <= kLogTolerance;
    ok = ok && pass;
    orbitals.push_back({{"orbital", i},
                        {"residual", res},
                        {"perturbed_residual", pert.orbital_residuals[q]},
                        {"contrast", contrast},
                        {"log_coefficient", sm.log_coefficient},
                        {"log_relative", sm.log_relative},
                        {"even_residual", sm.even_residual},
                        {"ok", pass}});
  }
  json pairs = json::array();
  for (const auto& p : base.pair_residuals) {
    const bool pass = p.norm <= kLiftedTolerance;
    ok = ok && pass;
    pairs.push_back({{"k", p.k}, {"l", p.l}, {"residual", p.norm}, {"ok", pass}});
  }
  report["verification"] = {{"nucleus", 0},
                            {"window", base.window},
                            {"points", cfg.lift.points},
                            {"orbitals", orbitals},
                            {"pairs", pairs},
                            {"passed", ok}};
  write_report(dir, report);
  return {ok ? exit_ok : exit_verification, ok ? "verification passed" : "verification found failing checks", report};
}

std::vector<SelftestCheck> ks_selftest(const SelftestOptions& o) {
  auto map = [&](const KsPoint& p) {
    SpatialPoint x = ks_map(p);
    if (o.inject_sign_error) {
      const auto& y = p.y;
      x.x[1] = 2.0 * (y[0] * y[1] + y[2] * y[3]);
    }
    return x;
  };
  std::mt19937_64 rng(o.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  double norm_err = 0.0;
  double fiber_err = 0.0;
  double preimage_err = 0.0;
  for (std::size_t k = 0; k < o.points; ++k) {
    KsPoint y;
    for (double& c : y.y) c = normal(rng);
    const double n2 = y.norm() * y.norm();
    const SpatialPoint x = map(y);
    norm_err = std::max(norm_err, std::abs(x.norm() - n2) / n2);
    const SpatialPoint xr = map(fiber_rotate(y, angle(rng)));
    fiber_err = std::max(fiber_err, (xr - x).norm() / n2);
    const SpatialPoint back = map(primary_preimage(x));
    preimage_err = std::max(preimage_err, (back - x).norm() / std::max(x.norm(), 1e-300));
  }

  // (Delta_3 f)(s^2) = Delta_4 (f(s^2)) / (4 s^2), compared with the analytic Delta_3 f
  struct Radial {
    double (*f)(double);
    double (*lap)(double);
  };
  const Radial funcs[] = {
      {[](double r) { return std::exp(-r * r); }, [](double r) { return (4 * r * r - 6) * std::exp(-r * r); }},
      {[](double r) { return 1.0 / (1 + r * r); },
       [](double r) { return (2 * r * r - 6) / std::pow(1 + r * r, 3); }},
      {[](double r) { return r * r; }, [](double) { return 6.0; }},
  };
  double lap_err = 0.0;
  for (const auto& fn : funcs) {
    const std::size_t n = 3201;
    const double s_max = 1.6;
    std::vector<double> s(n), g(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = s_max * static_cast<double>(i) / static_cast<double>(n - 1);
      g[i] = fn.f(s[i] * s[i]);
    }
    const RadialProfile lap = laplacian4_radial(RadialProfile(s, g));
    double scale = 0.0;
    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (s[i] < 0.2 || s[i] > 1.5) continue;
      const double exact = fn.lap(s[i] * s[i]);
      scale = std::max(scale, std::abs(exact));
      err = std::max(err, std::abs(lap.value(i) / (4 * s[i] * s[i]) - exact));
    }
    lap_err = std::max(lap_err, err / scale);
  }

  // || |y| phi_K ||^2 / || phi ||^2 = pi / 4
  double (*profiles[])(double) = {
      [](double r) { return std::exp(-r); },
      [](double r) { return std::exp(-r * r); },
      [](double r) { return 1.0 / std::pow(1 + r * r, 2); },
      [](double r) { return r * std::exp(-r); },
      [](double r) { return (1 + r) * std::exp(-2 * r); },
  };
  double iso_err = 0.0;
  for (auto* p : profiles) {
    const std::size_t n = 20001;
    const double r_max = 30.0;
    std::vector<double> r(n), v(n);
    for (std::size_t i = 0; i < n; ++i) {
      r[i] = r_max * static_cast<double>(i) / static_cast<double>(n - 1);
      v[i] = p(r[i]);
    }
    const RadialProfile phi(r, v);
    const double ratio = weighted_pullback_norm(phi, r_max) / radial_norm_squared(phi, r_max);
    iso_err = std::max(iso_err, std::abs(ratio / (std::numbers::pi / 4) - 1.0));
  }

  return {{"norm identity |K(y)| = |y|^2", norm_err <= 1e-12, norm_err, 1e-12},
          {"fiber invariance K(A(t) y) = K(y)", fiber_err <= 1e-12, fiber_err, 1e-12},
          {"preimage round trip", preimage_err <= 1e-12, preimage_err, 1e-12},
          {"Laplacian identity", lap_err <= 1e-6, lap_err, 1e-6},
          {"pullback isometry pi/4", iso_err <= 1e-6, iso_err, 1e-6}};
}

}  // namespace ksatom
