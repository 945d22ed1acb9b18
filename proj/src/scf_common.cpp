#include <algorithm>
#include <cmath>
#include <tuple>

#include "ksatom/errors.hpp"
#include "scf_internal.hpp"

namespace ksatom {

std::string to_string(Mode m) {
  switch (m) {
    case Mode::hartree:
      return "hartree";
    case Mode::hartree_fock:
      return "hartree_fock";
    case Mode::mcscf:
      return "mcscf";
  }
  return "unknown";
}

Mode mode_from_string(const std::string& s) {
  if (s == "hartree") return Mode::hartree;
  if (s == "hartree_fock" || s == "hf") return Mode::hartree_fock;
  if (s == "mcscf") return Mode::mcscf;
  throw ConfigError("system.mode", "unknown mode '" + s + "' (hartree, hartree_fock, mcscf)");
}

void SolverConfig::validate() const {
  if (max_iterations < 1) throw ConfigError("solver.max_iterations", "must be >= 1");
  if (!(energy_tolerance > 0.0)) throw ConfigError("solver.energy_tolerance", "must be positive");
  if (!(residual_tolerance > 0.0)) throw ConfigError("solver.residual_tolerance", "must be positive");
  if (!(damping > 0.0 && damping <= 1.0)) throw ConfigError("solver.damping", "must lie in (0, 1]");
  if (!(level_shift >= 0.0)) throw ConfigError("solver.level_shift", "must be >= 0");
  if (l_max < 0 || l_max > 6) throw ConfigError("grid.l_max", "must lie in [0, 6]");
  (void)grid();
  for (std::size_t i = 0; i < orbital_channels.size(); ++i) {
    const Channel c = orbital_channels[i];
    if (c.l < 0 || c.l > l_max || std::abs(c.m) > c.l) {
      throw ConfigError("system.orbital_channels[" + std::to_string(i) + "]", "need |m| <= l <= l_max");
    }
  }
}

namespace detail {

std::vector<Channel> all_channels(int l_max) {
  std::vector<Channel> out;
  for (int l = 0; l <= l_max; ++l) {
    for (int m = -l; m <= l; ++m) out.push_back({l, m});
  }
  return out;
}

std::vector<Channel> aufbau_channels(int n, int l_max) {
  // (principal number, l, m, k)
  std::vector<std::tuple<int, int, int, int>> levels;
  for (int k = 0; k < n; ++k) {
    for (const Channel c : all_channels(l_max)) levels.emplace_back(c.l + 1 + k, c.l, c.m, k);
  }
  std::sort(levels.begin(), levels.end());
  std::vector<Channel> out;
  for (int i = 0; i < n; ++i) out.push_back({std::get<1>(levels[i]), std::get<2>(levels[i])});
  return out;
}

std::vector<Orbital> bare_orbitals(const std::vector<Channel>& channels, double charge, const RadialGrid& grid) {
  const auto v = nuclear_potential(grid, charge);
  std::vector<Orbital> out;
  for (std::size_t i = 0; i < channels.size(); ++i) {
    const std::size_t k = std::count(channels.begin(), channels.begin() + i, channels[i]);
    auto pairs = eigensolve_radial(v, channels[i].l, k + 1, grid);
    out.push_back({channels[i], std::move(pairs[k].u)});
  }
  return out;
}

void lowdin_per_channel(std::vector<Orbital>& orbitals, const RadialGrid& grid) {
  std::vector<bool> done(orbitals.size(), false);
  for (std::size_t a = 0; a < orbitals.size(); ++a) {
    if (done[a]) continue;
    std::vector<std::size_t> idx;
    for (std::size_t b = a; b < orbitals.size(); ++b) {
      if (orbitals[b].channel == orbitals[a].channel) idx.push_back(b);
    }
    const auto k = static_cast<Eigen::Index>(idx.size());
    Eigen::MatrixXd S(k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
      for (Eigen::Index j = 0; j < k; ++j) S(i, j) = grid.inner(orbitals[idx[i]].u, orbitals[idx[j]].u);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
    if (es.eigenvalues().minCoeff() <= 1e-14 * es.eigenvalues().maxCoeff()) {
      throw InternalError("lowdin_per_channel: linearly dependent orbitals");
    }
    const Eigen::MatrixXd X =
        es.eigenvectors() * es.eigenvalues().cwiseInverse().cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
    std::vector<std::vector<double>> fresh(idx.size(), std::vector<double>(grid.size(), 0.0));
    for (Eigen::Index i = 0; i < k; ++i) {
      for (Eigen::Index j = 0; j < k; ++j) {
        const double x = X(j, i);
        for (std::size_t t = 0; t < grid.size(); ++t) fresh[i][t] += x * orbitals[idx[j]].u[t];
      }
    }
    for (Eigen::Index i = 0; i < k; ++i) {
      orbitals[idx[i]].u = std::move(fresh[i]);
      done[idx[i]] = true;
    }
  }
}

double l2_norm(const RadialGrid& grid, const std::vector<double>& f) { return std::sqrt(grid.inner(f, f)); }

void check_atom(const ElectronicModel& model) {
  if (!model.frame.is_atom_at_origin()) {
    throw UnsupportedError("SCF solves need a single nucleus at the origin");
  }
}

void finish_history(ScfResult& r) {
  r.monotone = true;
  for (std::size_t k = 2; k < r.history.size(); ++k) {
    if (r.history[k].energy > r.history[k - 1].energy + 1e-9) r.monotone = false;
  }
}

}  // namespace detail

std::vector<double> build_direct(const OrbitalSet& orbitals, const std::vector<double>& weights, Channel target,
                                 const AngularCoupling* angular) {
  if (weights.size() != orbitals.size()) throw ConsistencyError("build_direct: weight count mismatch");
  std::optional<AngularCoupling> own;
  if (!angular) angular = &own.emplace(coupling_for(orbitals, target.l));
  const auto& grid = orbitals.grid();
  std::vector<double> out(grid.size(), 0.0), dens(grid.size());
  for (std::size_t j = 0; j < orbitals.size(); ++j) {
    if (weights[j] == 0.0) continue;
    const Channel cj = orbitals[j].channel;
    for (std::size_t t = 0; t < grid.size(); ++t) dens[t] = orbitals[j].u[t] * orbitals[j].u[t];
    for (int lam : angular->lambdas(cj, cj)) {
      const double c = angular->coupling(lam, target, target, cj, cj);
      if (c == 0.0) continue;
      const auto y = multipole_potential(grid, dens, lam);
      for (std::size_t t = 0; t < grid.size(); ++t) out[t] += weights[j] * c * y[t];
    }
  }
  return out;
}

std::vector<double> build_exchange(const OrbitalSet& orbitals, const std::vector<double>& weights,
                                   const Orbital& target, const AngularCoupling* angular) {
  if (weights.size() != orbitals.size()) throw ConsistencyError("build_exchange: weight count mismatch");
  const auto& grid = orbitals.grid();
  if (target.u.size() != grid.size()) throw ConsistencyError("build_exchange: target not on the orbital grid");
  std::optional<AngularCoupling> own;
  if (!angular) angular = &own.emplace(coupling_for(orbitals, target.channel.l));
  const Channel ct = target.channel;
  std::vector<double> out(grid.size(), 0.0), pair(grid.size());
  for (std::size_t j = 0; j < orbitals.size(); ++j) {
    if (weights[j] == 0.0) continue;
    const Channel cj = orbitals[j].channel;
    for (std::size_t t = 0; t < grid.size(); ++t) pair[t] = orbitals[j].u[t] * target.u[t];
    for (int lam : angular->lambdas(ct, cj)) {
      const double c = angular->coupling(lam, ct, cj, cj, ct);
      if (c == 0.0) continue;
      const auto y = multipole_potential(grid, pair, lam);
      for (std::size_t t = 0; t < grid.size(); ++t) out[t] += weights[j] * c * y[t] * orbitals[j].u[t];
    }
  }
  return out;
}

double hf_energy(const OrbitalSet& orbitals, double charge) {
  const AngularCoupling angular = coupling_for(orbitals);
  const IntegralTable ints(orbitals, charge, angular);
  double e = 0.0;
  for (std::size_t i = 0; i < orbitals.size(); ++i) {
    e += ints.one_body(i, i);
    for (std::size_t j = 0; j < orbitals.size(); ++j) {
      e += 0.5 * (ints.two_body(i, i, j, j) - ints.two_body(i, j, j, i));
    }
  }
  return e;
}

double hartree_energy(const OrbitalSet& orbitals, double charge) {
  const AngularCoupling angular = coupling_for(orbitals);
  const IntegralTable ints(orbitals, charge, angular);
  double e = 0.0;
  for (std::size_t i = 0; i < orbitals.size(); ++i) {
    e += ints.one_body(i, i);
    for (std::size_t j = i + 1; j < orbitals.size(); ++j) e += ints.two_body(i, i, j, j);
  }
  return e;
}

ScfResult solve(const ElectronicModel& model, const SolverConfig& config,
                const std::optional<ConfigurationSet>& cs_init) {
  config.validate();
  switch (config.mode) {
    case Mode::hartree:
      return detail::hartree_run(model, config);
    case Mode::hartree_fock:
      return detail::hf_run(model, config);
    case Mode::mcscf:
      return detail::mcscf_run(model, cs_init ? *cs_init : ConfigurationSet(model.electrons, model.orbitals),
                               config);
  }
  throw InternalError("solve: unknown mode");
}

namespace {

ScfResult require_converged(ScfResult r, const char* who) {
  if (!r.converged) {
    std::vector<double> res;
    for (const auto& h : r.history) res.push_back(h.residual);
    throw ConvergenceError(std::string(who) + ": no convergence after " + std::to_string(r.history.size()) +
                               " iterations",
                           std::move(res));
  }
  return r;
}

}  // namespace

ScfResult hf_scf(const ElectronicModel& model, const SolverConfig& config) {
  if (config.mode != Mode::hartree_fock) throw PreconditionError("hf_scf: mode must be hartree_fock");
  config.validate();
  return require_converged(detail::hf_run(model, config), "hf_scf");
}

ScfResult hartree_scf(const ElectronicModel& model, const SolverConfig& config) {
  if (config.mode != Mode::hartree) throw PreconditionError("hartree_scf: mode must be hartree");
  config.validate();
  return require_converged(detail::hartree_run(model, config), "hartree_scf");
}

ScfResult mcscf_solve(const ElectronicModel& model, const ConfigurationSet& cs_init, const SolverConfig& config) {
  if (config.mode != Mode::mcscf) throw PreconditionError("mcscf_solve: mode must be mcscf");
  config.validate();
  return require_converged(detail::mcscf_run(model, cs_init, config), "mcscf_solve");
}

std::vector<double> assemble_augmented_residual(const ScfResult& result) {
  const auto& orbs = result.orbitals;
  const auto& grid = orbs.grid();
  const double z = result.model.frame[0].charge;
  const std::size_t m = orbs.size();
  std::vector<double> out(m);
  if (result.mode == Mode::hartree) {
    const auto v = nuclear_potential(grid, z);
    for (std::size_t i = 0; i < m; ++i) {
      std::vector<double> w(m, 1.0);
      w[i] = 0.0;
      auto u = build_direct(orbs, w, orbs[i].channel);
      for (std::size_t t = 0; t < grid.size(); ++t) u[t] += v[t];
      auto hu = apply_channel_hamiltonian_accurate(orbs[i].u, orbs[i].channel.l, u, grid);
      for (std::size_t t = 0; t < grid.size(); ++t) hu[t] -= result.eigenvalues[i] * orbs[i].u[t];
      out[i] = detail::l2_norm(grid, hu);
    }
    return out;
  }
  const AngularCoupling angular = coupling_for(orbs);
  const IntegralTable ints(orbs, z, angular);
  const Eigen::MatrixXd D = one_rdm(result.configuration);
  const std::vector<double> A = two_rdm(result.configuration);
  auto G = orbital_gradients(orbs, ints, D, A, z, angular, true);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double l = result.multipliers(i, j);
      if (l == 0.0) continue;
      for (std::size_t t = 0; t < grid.size(); ++t) G[i][t] -= l * orbs[j].u[t];
    }
    out[i] = detail::l2_norm(grid, G[i]);
  }
  return out;
}

OrbitalSet rotate_orbitals(const OrbitalSet& orbitals, const Eigen::MatrixXd& U) {
  const std::size_t m = orbitals.size();
  if (static_cast<std::size_t>(U.rows()) != m || static_cast<std::size_t>(U.cols()) != m) {
    throw ConsistencyError("rotate_orbitals: matrix size mismatch");
  }
  std::vector<Orbital> out;
  for (std::size_t i = 0; i < m; ++i) {
    Orbital o{orbitals[i].channel, std::vector<double>(orbitals.grid().size(), 0.0)};
    for (std::size_t j = 0; j < m; ++j) {
      const double c = U(j, i);
      if (std::abs(c) < 1e-15) continue;
      if (orbitals[j].channel != o.channel) throw ConsistencyError("rotate_orbitals: mixes different channels");
      for (std::size_t t = 0; t < o.u.size(); ++t) o.u[t] += c * orbitals[j].u[t];
    }
    out.push_back(std::move(o));
  }
  return OrbitalSet(orbitals.grid(), std::move(out));
}

double projector_distance(const OrbitalSet& a, const OrbitalSet& b) {
  if (!(a.grid() == b.grid())) throw ConsistencyError("projector_distance: different grids");
  if (a.orthonormality_error() <= 1e-10 && b.orthonormality_error() <= 1e-10) {
    // |P_a - P_b|^2 = sum_j |(1 - P_a) b_j|^2 + sum_i |(1 - P_b) a_i|^2 for
    // orthonormal sets; avoids the cancellation of the trace formula below
    auto leak = [](const OrbitalSet& from, const OrbitalSet& onto) {
      double acc = 0.0;
      for (std::size_t j = 0; j < from.size(); ++j) {
        std::vector<double> r = from[j].u;
        for (std::size_t i = 0; i < onto.size(); ++i) {
          if (onto[i].channel != from[j].channel) continue;
          const double c = onto.grid().inner(onto[i].u, from[j].u);
          for (std::size_t t = 0; t < r.size(); ++t) r[t] -= c * onto[i].u[t];
        }
        acc += from.grid().inner(r, r);
      }
      return acc;
    };
    return std::sqrt(leak(b, a) + leak(a, b));
  }
  double cross = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (a[i].channel != b[j].channel) continue;
      const double s = a.grid().inner(a[i].u, b[j].u);
      cross += s * s;
    }
  }
  auto self = [](const OrbitalSet& o) {
    const Eigen::MatrixXd s = o.overlap();
    return s.cwiseProduct(s).sum();
  };
  return std::sqrt(std::max(0.0, self(a) + self(b) - 2.0 * cross));
}

}  // namespace ksatom
