#pragma once

#include <vector>

#include "ksatom/scf.hpp"

namespace ksatom::detail {

/// All channels with l <= l_max, ordered by (l, m).
std::vector<Channel> all_channels(int l_max);

/// Channels of the n lowest bare-nucleus levels -Z^2/(4 (l+1+k)^2); ties
/// broken by l, then m, then node count k.
std::vector<Channel> aufbau_channels(int n, int l_max);

/// k-th bare-nucleus eigenfunction for the k-th occurrence of each channel.
std::vector<Orbital> bare_orbitals(const std::vector<Channel>& channels, double charge, const RadialGrid& grid);

/// Loewdin orthonormalization within each channel.
void lowdin_per_channel(std::vector<Orbital>& orbitals, const RadialGrid& grid);

/// sqrt(int f^2 dr)
double l2_norm(const RadialGrid& grid, const std::vector<double>& f);

/// Throws PreconditionError/UnsupportedError for inputs the radial solvers cannot take.
void check_atom(const ElectronicModel& model);

ScfResult hf_run(const ElectronicModel& model, const SolverConfig& config);
ScfResult hartree_run(const ElectronicModel& model, const SolverConfig& config);
ScfResult mcscf_run(const ElectronicModel& model, const ConfigurationSet& cs_init, const SolverConfig& config);

/// Sets monotone from the history.
void finish_history(ScfResult& r);

}  // namespace ksatom::detail
