#include <algorithm>
#include <cmath>
#include <map>

#include "davidson.hpp"
#include "ksatom/errors.hpp"
#include "scf_internal.hpp"

namespace ksatom::detail {

namespace {

constexpr double kShiftFade = 1e-1;

// Fock operator of one channel in the w = u/sqrt(r) variables.
struct ChannelFock {
  Channel channel;
  TridiagonalPencil local;
  std::function<void(const std::vector<double>&, std::vector<double>&)> exchange;
};

struct Candidate {
  double energy;
  Channel channel;
  int k;
  std::vector<double> x;  // B-normalized
};

class FockBuilder {
 public:
  FockBuilder(const RadialGrid& grid, double charge, const AngularCoupling& angular)
      : grid_(grid), angular_(angular), v_(nuclear_potential(grid, charge)), sqrt_r_(grid.size()),
        r32_(grid.size()) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      sqrt_r_[i] = std::sqrt(grid.r(i));
      r32_[i] = grid.r(i) * sqrt_r_[i];
    }
  }

  ChannelFock build(const OrbitalSet& orbs, Channel ch) const {
    const std::vector<double> ones(orbs.size(), 1.0);
    auto u = build_direct(orbs, ones, ch, &angular_);
    for (std::size_t i = 0; i < u.size(); ++i) u[i] += v_[i];
    ChannelFock f{ch, channel_pencil(grid_, ch.l, u), {}};
    // orbitals are captured by value: the operator outlives this iteration's set
    f.exchange = [this, orbs, ch](const std::vector<double>& x, std::vector<double>& out) {
      std::vector<double> ux(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) ux[i] = sqrt_r_[i] * x[i];
      const std::vector<double> ones(orbs.size(), 1.0);
      const auto k = build_exchange(orbs, ones, Orbital{ch, std::move(ux)}, &angular_);
      for (std::size_t i = 0; i < x.size(); ++i) out[i] -= r32_[i] * k[i];
    };
    return f;
  }

  std::vector<double> to_x(const std::vector<double>& u) const {
    const double sh = std::sqrt(grid_.log_step());
    std::vector<double> x(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) x[i] = u[i] * sh / sqrt_r_[i];
    return x;
  }

  std::vector<double> to_u(const std::vector<double>& x) const {
    const double sh = std::sqrt(grid_.log_step());
    std::vector<double> u(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) u[i] = x[i] * sqrt_r_[i] / sh;
    return u;
  }

 private:
  const RadialGrid& grid_;
  const AngularCoupling& angular_;
  std::vector<double> v_;
  std::vector<double> sqrt_r_;
  std::vector<double> r32_;
};

// ascending energies; near-degenerate clusters ordered by (l, m, k)
void sort_candidates(std::vector<Candidate>& c) {
  std::sort(c.begin(), c.end(), [](const Candidate& a, const Candidate& b) { return a.energy < b.energy; });
  std::size_t start = 0;
  while (start < c.size()) {
    std::size_t end = start + 1;
    while (end < c.size() && c[end].energy - c[start].energy <= 1e-6) ++end;
    std::sort(c.begin() + start, c.begin() + end, [](const Candidate& a, const Candidate& b) {
      return std::tie(a.channel.l, a.channel.m, a.k) < std::tie(b.channel.l, b.channel.m, b.k);
    });
    start = end;
  }
}

}  // namespace

ScfResult hf_run(const ElectronicModel& model, const SolverConfig& cfg) {
  check_atom(model);
  if (model.orbitals != model.electrons) throw PreconditionError("hf_scf: needs M = N");
  const int n = model.electrons;
  if (!cfg.orbital_channels.empty() && static_cast<int>(cfg.orbital_channels.size()) != n) {
    throw ConfigError("system.orbital_channels", "needs one channel per orbital");
  }
  const double z = model.frame[0].charge;
  const RadialGrid grid = cfg.grid();
  const AngularCoupling angular(cfg.l_max);
  const FockBuilder fock(grid, z, angular);
  const bool fixed = !cfg.orbital_channels.empty();

  std::vector<Channel> start = fixed ? cfg.orbital_channels : aufbau_channels(n, cfg.l_max);
  std::vector<Channel> candidates = fixed ? start : all_channels(cfg.l_max);
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  OrbitalSet orbs(grid, bare_orbitals(start, z, grid));
  std::vector<double> weight(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) weight[i] = 1.0 / (grid.r(i) * grid.r(i));
  std::map<Channel, std::vector<double>> extra_guess;

  ScfResult res;
  res.mode = Mode::hartree_fock;
  res.model = model;
  res.configuration = ConfigurationSet(n, n);
  double e_prev = 0.0;
  Eigen::MatrixXd lambda = Eigen::MatrixXd::Zero(n, n);

  for (int it = 0;; ++it) {
    std::map<Channel, ChannelFock> ops;
    for (Channel ch : candidates) ops.emplace(ch, fock.build(orbs, ch));

    // residual of the current orbitals
    lambda.setZero();
    std::vector<std::vector<double>> xs(n), axs(n);
    for (int i = 0; i < n; ++i) {
      xs[i] = fock.to_x(orbs[i].u);
      const auto& op = ops.at(orbs[i].channel);
      axs[i] = op.local.apply(xs[i]);
      op.exchange(xs[i], axs[i]);
    }
    double residual = 0.0;
    for (int i = 0; i < n; ++i) {
      const auto mass = ops.at(orbs[i].channel).local.mass();
      std::vector<double> rho = axs[i];
      for (int j = 0; j < n; ++j) {
        if (orbs[j].channel != orbs[i].channel) continue;
        double l = 0.0;
        for (std::size_t t = 0; t < grid.size(); ++t) l += xs[j][t] * axs[i][t];
        lambda(i, j) = l;
        for (std::size_t t = 0; t < grid.size(); ++t) rho[t] -= l * mass[t] * xs[j][t];
      }
      double r2 = 0.0;
      for (std::size_t t = 0; t < grid.size(); ++t) r2 += weight[t] * rho[t] * rho[t];
      residual = std::max(residual, std::sqrt(r2));
    }
    const double e = hf_energy(orbs, z);
    res.history.push_back({it, e, residual});
    const bool converged =
        it > 0 && std::abs(e - e_prev) <= cfg.energy_tolerance && residual <= cfg.residual_tolerance;
    e_prev = e;
    if (converged || it >= cfg.max_iterations) {
      res.converged = converged;
      res.energy = e;
      res.residual = residual;
      break;
    }

    // level-shifted per-channel eigenproblems
    const double tol = std::max(0.01 * cfg.residual_tolerance, 0.05 * residual);
    // the shift leaves fixed points unchanged; fade it out near convergence
    const double shift = cfg.level_shift * std::min(1.0, residual / kShiftFade);
    std::vector<Candidate> cands;
    std::map<Channel, std::vector<std::size_t>> occ_idx;
    for (int i = 0; i < n; ++i) occ_idx[orbs[i].channel].push_back(i);
    for (Channel ch : candidates) {
      const auto& op = ops.at(ch);
      detail::ChannelProblem p;
      p.local = &op.local;
      p.nonlocal = op.exchange;
      p.shift = shift;
      p.residual_weight = &weight;
      std::vector<std::vector<double>> guess;
      for (std::size_t i : occ_idx[ch]) {
        p.occupied.push_back(xs[i]);
        guess.push_back(xs[i]);
      }
      const std::size_t n_occ = p.occupied.size();
      const std::size_t count = fixed ? n_occ : n_occ + 1;
      if (auto g = extra_guess.find(ch); g != extra_guess.end() && count > n_occ) guess.push_back(g->second);
      const auto dv = detail::davidson(p, count, guess, n_occ, tol, std::max(tol, 1e-3), 200);
      for (std::size_t k = 0; k < count; ++k) {
        double overlap2 = 0.0;
        for (const auto& w : p.occupied) {
          double c = 0.0;
          for (std::size_t t = 0; t < grid.size(); ++t) c += w[t] * op.local.mass()[t] * dv.vectors[k][t];
          overlap2 += c * c;
        }
        const double unshifted = dv.theta[k] - shift * (1.0 - overlap2);
        cands.push_back({unshifted, ch, static_cast<int>(k), dv.vectors[k]});
      }
      if (count > n_occ) extra_guess[ch] = dv.vectors[n_occ];
    }

    // occupation: N lowest (fixed channels keep their slots)
    std::vector<Candidate> chosen;
    if (fixed) {
      for (auto& c : cands) {
        if (static_cast<std::size_t>(c.k) < occ_idx[c.channel].size()) chosen.push_back(c);
      }
      sort_candidates(chosen);
    } else {
      sort_candidates(cands);
      chosen.assign(cands.begin(), cands.begin() + n);
    }

    // damped update, channel by channel
    std::vector<Orbital> next;
    for (const auto& c : chosen) next.push_back({c.channel, fock.to_u(c.x)});
    std::map<Channel, std::vector<std::size_t>> next_idx;
    for (int i = 0; i < n; ++i) next_idx[next[i].channel].push_back(i);
    for (auto& [ch, idx] : next_idx) {
      const auto& old = occ_idx[ch];
      if (old.size() != idx.size()) continue;
      std::vector<std::size_t> sorted_new = idx;
      std::sort(sorted_new.begin(), sorted_new.end(),
                [&](std::size_t a, std::size_t b) { return chosen[a].k < chosen[b].k; });
      for (std::size_t q = 0; q < idx.size(); ++q) {
        auto& u = next[sorted_new[q]].u;
        const auto& uo = orbs[old[q]].u;
        const double s = grid.inner(u, uo) < 0.0 ? -1.0 : 1.0;
        for (std::size_t t = 0; t < grid.size(); ++t) u[t] = (1.0 - cfg.damping) * uo[t] + cfg.damping * s * u[t];
      }
    }
    lowdin_per_channel(next, grid);
    orbs = OrbitalSet(grid, std::move(next));
  }

  // canonical orbitals: diagonalize the multipliers within each channel
  std::map<Channel, std::vector<std::size_t>> by_ch;
  for (int i = 0; i < n; ++i) by_ch[orbs[i].channel].push_back(i);
  std::vector<std::pair<double, Orbital>> canon;
  for (auto& [ch, idx] : by_ch) {
    const auto k = static_cast<Eigen::Index>(idx.size());
    Eigen::MatrixXd L(k, k);
    for (Eigen::Index a = 0; a < k; ++a) {
      for (Eigen::Index b = 0; b < k; ++b) L(a, b) = 0.5 * (lambda(idx[a], idx[b]) + lambda(idx[b], idx[a]));
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(L);
    for (Eigen::Index a = 0; a < k; ++a) {
      Orbital o{ch, std::vector<double>(grid.size(), 0.0)};
      for (Eigen::Index b = 0; b < k; ++b) {
        for (std::size_t t = 0; t < grid.size(); ++t) o.u[t] += es.eigenvectors()(b, a) * orbs[idx[b]].u[t];
      }
      // positive near the origin
      for (double v : o.u) {
        if (std::abs(v) > 1e-10) {
          if (v < 0) {
            for (double& w : o.u) w = -w;
          }
          break;
        }
      }
      canon.emplace_back(es.eigenvalues()(a), std::move(o));
    }
  }
  std::stable_sort(canon.begin(), canon.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<Orbital> final_orbs;
  res.multipliers = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    res.eigenvalues.push_back(canon[i].first);
    res.multipliers(i, i) = canon[i].first;
    final_orbs.push_back(std::move(canon[i].second));
  }
  res.orbitals = OrbitalSet(grid, std::move(final_orbs));

  // Aufbau check: re-diagonalize the final operator without shift
  if (!fixed) {
    std::vector<double> lowest;
    std::map<Channel, std::size_t> n_occ;
    for (int i = 0; i < n; ++i) ++n_occ[res.orbitals[i].channel];
    for (Channel ch : candidates) {
      const auto op = fock.build(res.orbitals, ch);
      detail::ChannelProblem p;
      p.local = &op.local;
      p.nonlocal = op.exchange;
      p.residual_weight = &weight;
      std::vector<std::vector<double>> guess;
      for (int i = 0; i < n; ++i) {
        if (res.orbitals[i].channel == ch) guess.push_back(fock.to_x(res.orbitals[i].u));
      }
      if (auto g = extra_guess.find(ch); g != extra_guess.end()) guess.push_back(g->second);
      const std::size_t count = n_occ[ch] + 1;
      const auto dv = detail::davidson(p, count, guess, count, 1e-7, 1e-7, 400);
      for (double t : dv.theta) lowest.push_back(t);
    }
    std::sort(lowest.begin(), lowest.end());
    const double gap_tol = 1e-6 + 10 * cfg.residual_tolerance;
    for (int i = 0; i < n; ++i) {
      if (std::abs(lowest[i] - res.eigenvalues[i]) > gap_tol) res.aufbau_consistent = false;
    }
  }
  finish_history(res);
  return res;
}

}  // namespace ksatom::detail
