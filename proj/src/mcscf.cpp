#include <algorithm>
#include <cmath>
#include <map>
#include <memory>

#include "ksatom/errors.hpp"
#include "scf_internal.hpp"

namespace ksatom::detail {

namespace {

struct CiState {
  double energy;
  ConfigurationSet cs;
};

CiState solve_ci(const IntegralTable& ints, const ConfigurationSet& shape) {
  const Eigen::MatrixXd H = slater_condon_matrix(shape, ints);
  auto [e, c] = lowest_ci_eigenpair(H);
  return {e, ConfigurationSet(shape.electrons(), shape.orbitals(), std::move(c))};
}

// Rotates each channel block to natural orbitals (occupation descending).
// Returns false when nothing changed.
bool natural_rotation(OrbitalSet& orbs, const Eigen::MatrixXd& D) {
  const std::size_t m = orbs.size();
  Eigen::MatrixXd U = Eigen::MatrixXd::Identity(m, m);
  bool changed = false;
  std::map<Channel, std::vector<std::size_t>> by_ch;
  for (std::size_t i = 0; i < m; ++i) by_ch[orbs[i].channel].push_back(i);
  for (auto& [ch, idx] : by_ch) {
    if (idx.size() < 2) continue;
    const auto k = static_cast<Eigen::Index>(idx.size());
    Eigen::MatrixXd B(k, k);
    double off = 0.0;
    for (Eigen::Index a = 0; a < k; ++a) {
      for (Eigen::Index b = 0; b < k; ++b) {
        B(a, b) = D(idx[a], idx[b]);
        if (a != b) off = std::max(off, std::abs(B(a, b)));
      }
    }
    if (off < 1e-12) continue;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B);
    for (Eigen::Index a = 0; a < k; ++a) {
      // descending occupation; sign keeps the old orbital's orientation
      Eigen::VectorXd col = es.eigenvectors().col(k - 1 - a);
      Eigen::Index imax = 0;
      col.cwiseAbs().maxCoeff(&imax);
      if (col(imax) < 0) col = -col;
      for (Eigen::Index b = 0; b < k; ++b) U(idx[b], idx[a]) = col(b);
    }
    changed = true;
  }
  if (changed) orbs = rotate_orbitals(orbs, U);
  return changed;
}

}  // namespace

ScfResult mcscf_run(const ElectronicModel& model, const ConfigurationSet& cs_init, const SolverConfig& cfg) {
  check_atom(model);
  const int n = model.electrons;
  const int m = model.orbitals;
  if (m > 4) throw UnsupportedError("mcscf_solve: at most 4 orbitals supported");
  if (cs_init.electrons() != n || cs_init.orbitals() != m) {
    throw ConsistencyError("mcscf_solve: configuration set does not match the model");
  }
  if (!cfg.orbital_channels.empty() && static_cast<int>(cfg.orbital_channels.size()) != m) {
    throw ConfigError("system.orbital_channels", "needs one channel per orbital");
  }
  const double z = model.frame[0].charge;
  const RadialGrid grid = cfg.grid();
  const std::vector<Channel> channels =
      cfg.orbital_channels.empty() ? aufbau_channels(m, cfg.l_max) : cfg.orbital_channels;
  int l_top = cfg.l_max;
  for (Channel c : channels) l_top = std::max(l_top, c.l);
  const AngularCoupling angular(l_top);
  const auto v = nuclear_potential(grid, z);
  std::vector<double> sqrt_r(grid.size()), r32(grid.size());
  for (std::size_t t = 0; t < grid.size(); ++t) {
    sqrt_r[t] = std::sqrt(grid.r(t));
    r32[t] = grid.r(t) * sqrt_r[t];
  }

  OrbitalSet orbs(grid, bare_orbitals(channels, z, grid));
  ScfResult res;
  res.mode = Mode::mcscf;
  res.model = model;
  double e_prev = 0.0;
  double step = 1.0;
  Eigen::MatrixXd lambda = Eigen::MatrixXd::Zero(m, m);
  std::vector<double> gamma(m, 0.0);
  CiState ci{0.0, cs_init};

  for (int it = 0;; ++it) {
    auto ints = std::make_unique<IntegralTable>(orbs, z, angular);
    ci = solve_ci(*ints, cs_init);
    if (natural_rotation(orbs, one_rdm(ci.cs))) {
      ints = std::make_unique<IntegralTable>(orbs, z, angular);
      ci = solve_ci(*ints, cs_init);
    }
    const Eigen::MatrixXd D = one_rdm(ci.cs);
    const std::vector<double> A = two_rdm(ci.cs);
    auto G = orbital_gradients(orbs, *ints, D, A, z, angular);
    lambda.setZero();
    for (int i = 0; i < m; ++i) {
      gamma[i] = D(i, i);
      for (int j = 0; j < m; ++j) {
        if (orbs[i].channel == orbs[j].channel) lambda(i, j) = grid.inner(orbs[j].u, G[i]);
      }
    }
    double residual = 0.0;
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        if (lambda(i, j) == 0.0) continue;
        for (std::size_t t = 0; t < grid.size(); ++t) G[i][t] -= lambda(i, j) * orbs[j].u[t];
      }
      residual = std::max(residual, l2_norm(grid, G[i]));
    }
    res.history.push_back({it, ci.energy, residual});
    const bool converged =
        it > 0 && std::abs(ci.energy - e_prev) <= cfg.energy_tolerance && residual <= cfg.residual_tolerance;
    e_prev = ci.energy;
    if (converged || it >= cfg.max_iterations) {
      res.converged = converged;
      res.residual = residual;
      break;
    }

    // preconditioned residual directions, orthogonal to the orbitals of the channel
    const auto occ = occupations(ci.cs);
    std::vector<std::vector<double>> dir(m);
    std::map<Channel, TridiagonalPencil> pencils;
    std::map<Channel, std::size_t> per_channel;
    for (int i = 0; i < m; ++i) ++per_channel[orbs[i].channel];
    for (auto& [ch, count] : per_channel) {
      auto u = build_direct(orbs, occ, ch, &angular);
      for (std::size_t t = 0; t < grid.size(); ++t) u[t] += v[t];
      pencils.emplace(ch, channel_pencil(grid, ch.l, u));
    }
    for (int i = 0; i < m; ++i) {
      dir[i].assign(grid.size(), 0.0);
      if (gamma[i] < 1e-10) continue;
      const auto& pencil = pencils.at(orbs[i].channel);
      const double ceiling = pencil.eigenvalue(per_channel[orbs[i].channel]) - 0.05;
      const double e_i = std::min(lambda(i, i) / gamma[i], ceiling);
      std::vector<double> rhs(grid.size());
      for (std::size_t t = 0; t < grid.size(); ++t) rhs[t] = r32[t] * G[i][t];
      const auto w = pencil.solve_shifted(e_i, rhs);
      for (std::size_t t = 0; t < grid.size(); ++t) dir[i][t] = -sqrt_r[t] * w[t] / gamma[i];
      for (int j = 0; j < m; ++j) {
        if (orbs[j].channel != orbs[i].channel) continue;
        const double c = grid.inner(orbs[j].u, dir[i]);
        for (std::size_t t = 0; t < grid.size(); ++t) dir[i][t] -= c * orbs[j].u[t];
      }
    }

    // backtracking line search on the CI energy
    double t_try = std::min(1.0, 2.0 * step);
    bool accepted = false;
    for (int k = 0; k < 30; ++k, t_try *= 0.5) {
      std::vector<Orbital> trial = orbs.orbitals();
      for (int i = 0; i < m; ++i) {
        for (std::size_t t = 0; t < grid.size(); ++t) trial[i].u[t] += t_try * dir[i][t];
      }
      lowdin_per_channel(trial, grid);
      OrbitalSet cand(grid, std::move(trial));
      const IntegralTable ti(cand, z, angular);
      const CiState cs_t = solve_ci(ti, cs_init);
      if (cs_t.energy < ci.energy) {
        orbs = std::move(cand);
        step = t_try;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      res.residual = residual;
      res.converged = residual <= cfg.residual_tolerance;
      break;
    }
  }

  res.energy = ci.energy;
  res.configuration = ci.cs;
  res.orbitals = orbs;
  res.multipliers = lambda;
  for (int i = 0; i < m; ++i) res.eigenvalues.push_back(gamma[i] > 1e-14 ? lambda(i, i) / gamma[i] : 0.0);
  finish_history(res);
  return res;
}

}  // namespace ksatom::detail
