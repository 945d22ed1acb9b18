#include <cmath>

#include "ksatom/errors.hpp"
#include "scf_internal.hpp"

namespace ksatom::detail {

// Product state: every orbital in the s channel, each relaxed in the field
// of the others. Orbitals are normalized but not mutually orthogonal.
ScfResult hartree_run(const ElectronicModel& model, const SolverConfig& cfg) {
  check_atom(model);
  const int n = model.electrons;
  if (model.orbitals != n) throw PreconditionError("hartree_scf: needs M = N");
  const double z = model.frame[0].charge;
  const RadialGrid grid = cfg.grid();
  const auto v = nuclear_potential(grid, z);
  const AngularCoupling angular(0);

  std::vector<Orbital> start(n, Orbital{{0, 0}, eigensolve_radial(v, 0, 1, grid)[0].u});
  OrbitalSet orbs(grid, std::move(start));

  ScfResult res;
  res.mode = Mode::hartree;
  res.model = model;
  res.configuration = ConfigurationSet(n, n);
  double e_prev = 0.0;
  std::vector<double> eps(n, 0.0);

  for (int it = 0;; ++it) {
    std::vector<std::vector<double>> pots(n);
    double residual = 0.0;
    for (int i = 0; i < n; ++i) {
      std::vector<double> w(n, 1.0);
      w[i] = 0.0;
      pots[i] = build_direct(orbs, w, {0, 0}, &angular);
      for (std::size_t t = 0; t < grid.size(); ++t) pots[i][t] += v[t];
      auto hu = apply_channel_hamiltonian(orbs[i].u, 0, pots[i], grid);
      eps[i] = grid.inner(orbs[i].u, hu);
      for (std::size_t t = 0; t < grid.size(); ++t) hu[t] -= eps[i] * orbs[i].u[t];
      residual = std::max(residual, l2_norm(grid, hu));
    }
    const double e = hartree_energy(orbs, z);
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
    std::vector<Orbital> next;
    for (int i = 0; i < n; ++i) {
      auto u = eigensolve_radial(pots[i], 0, 1, grid)[0].u;
      const double s = grid.inner(u, orbs[i].u) < 0.0 ? -1.0 : 1.0;
      for (std::size_t t = 0; t < grid.size(); ++t) u[t] = (1.0 - cfg.damping) * orbs[i].u[t] + cfg.damping * s * u[t];
      const double nrm = l2_norm(grid, u);
      for (double& x : u) x /= nrm;
      next.push_back({{0, 0}, std::move(u)});
    }
    orbs = OrbitalSet(grid, std::move(next));
  }
  res.eigenvalues = eps;
  res.multipliers = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) res.multipliers(i, i) = eps[i];
  res.orbitals = std::move(orbs);
  finish_history(res);
  return res;
}

}  // namespace ksatom::detail
