#include "ksatom/system_model.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "ksatom/errors.hpp"

namespace ksatom {

NuclearFrame::NuclearFrame(std::vector<Nucleus> nuclei) : nuclei_(std::move(nuclei)) {
  if (nuclei_.empty()) throw ConfigError("system.nuclei", "at least one nucleus required");
  for (std::size_t k = 0; k < nuclei_.size(); ++k) {
    const auto path = "system.nuclei[" + std::to_string(k) + "]";
    if (!(nuclei_[k].charge > 0.0) || !std::isfinite(nuclei_[k].charge)) {
      throw ConfigError(path + ".charge", "must be positive");
    }
    for (double c : nuclei_[k].position.x) {
      if (!std::isfinite(c)) throw ConfigError(path + ".position", "must be finite");
    }
    for (std::size_t j = 0; j < k; ++j) {
      if ((nuclei_[k].position - nuclei_[j].position).norm() == 0.0) {
        throw ConfigError(path + ".position", "coincides with nucleus " + std::to_string(j));
      }
    }
  }
}

double NuclearFrame::total_charge() const {
  double z = 0.0;
  for (const auto& n : nuclei_) z += n.charge;
  return z;
}

double NuclearFrame::nearest_distance(std::size_t k) const {
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < nuclei_.size(); ++j) {
    if (j != k) d = std::min(d, (nuclei_[j].position - nuclei_[k].position).norm());
  }
  return d;
}

bool NuclearFrame::is_atom_at_origin() const { return nuclei_.size() == 1 && nuclei_[0].position.norm() == 0.0; }

double coulomb_potential(const SpatialPoint& x, const NuclearFrame& frame) {
  double v = 0.0;
  for (const auto& n : frame.nuclei()) {
    const double d = (x - n.position).norm();
    if (d == 0.0) throw SingularityError("coulomb_potential: evaluation point at a nucleus");
    v -= n.charge / d;
  }
  return v;
}

ElectronicModel::ElectronicModel(int n, int m, NuclearFrame f) : electrons(n), orbitals(m), frame(std::move(f)) {
  if (n < 1) throw ConfigError("system.electrons", "must be >= 1");
  if (m < n) throw ConfigError("system.orbitals", "must be >= electrons");
}

namespace {

void enumerate(int n, int m, int start, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == n) {
    out.push_back(cur);
    return;
  }
  for (int j = start; j < m; ++j) {
    cur.push_back(j);
    enumerate(n, m, j + 1, cur, out);
    cur.pop_back();
  }
}

}  // namespace

ConfigurationSet::ConfigurationSet(int electrons, int orbitals) : n_(electrons), m_(orbitals) {
  if (electrons < 1 || orbitals < electrons) throw ConsistencyError("ConfigurationSet: need M >= N >= 1");
  if (orbitals > 30) throw UnsupportedError("ConfigurationSet: at most 30 orbitals");
  std::vector<int> cur;
  enumerate(n_, m_, 0, cur, configs_);
  c_.assign(configs_.size(), 0.0);
  c_[0] = 1.0;
}

ConfigurationSet::ConfigurationSet(int electrons, int orbitals, std::vector<double> coefficients)
    : ConfigurationSet(electrons, orbitals) {
  set_coefficients(std::move(coefficients));
}

void ConfigurationSet::set_coefficients(std::vector<double> c) {
  if (c.size() != configs_.size()) throw ConsistencyError("ConfigurationSet: coefficient count mismatch");
  double s = 0.0;
  for (double v : c) s += v * v;
  if (std::abs(s - 1.0) > 1e-12) throw ConsistencyError("ConfigurationSet: coefficients not normalized");
  c_ = std::move(c);
}

unsigned ConfigurationSet::mask(std::size_t i) const {
  unsigned b = 0;
  for (int j : configs_[i]) b |= 1u << j;
  return b;
}

std::vector<double> occupations(const ConfigurationSet& cs) {
  std::vector<double> n(cs.orbitals(), 0.0);
  for (std::size_t i = 0; i < cs.size(); ++i) {
    for (int j : cs.config(i)) n[j] += cs.coefficient(i) * cs.coefficient(i);
  }
  return n;
}

Density density(const OrbitalSet& orbitals, const std::vector<double>& occ) {
  if (occ.size() != orbitals.size()) throw ConsistencyError("density: occupation count mismatch");
  const auto& grid = orbitals.grid();
  std::vector<double> rho(grid.size(), 0.0);
  for (std::size_t j = 0; j < orbitals.size(); ++j) {
    if (occ[j] < 0.0) throw ConsistencyError("density: negative occupation");
    for (std::size_t i = 0; i < grid.size(); ++i) rho[i] += occ[j] * orbitals[j].u[i] * orbitals[j].u[i];
  }
  for (std::size_t i = 0; i < grid.size(); ++i) rho[i] /= 4.0 * std::numbers::pi * grid.r(i) * grid.r(i);
  std::vector<double> r(grid.radii().begin(), grid.radii().end());
  return {RadialProfile(std::move(r), std::move(rho)), occ};
}

Density density(const OrbitalSet& orbitals, const ConfigurationSet& cs) {
  if (static_cast<std::size_t>(cs.orbitals()) != orbitals.size()) {
    throw ConsistencyError("density: configuration set and orbitals differ in M");
  }
  return density(orbitals, occupations(cs));
}

}  // namespace ksatom
