#include <bit>
#include <cmath>

#include "ksatom/errors.hpp"
#include "ksatom/system_model.hpp"

namespace ksatom {

namespace {

// Fermionic operators on occupation bit strings; false when the result vanishes.
bool annihilate(unsigned& mask, int q, int& sign) {
  if (!(mask >> q & 1u)) return false;
  if (std::popcount(mask & ((1u << q) - 1u)) % 2) sign = -sign;
  mask &= ~(1u << q);
  return true;
}

bool create(unsigned& mask, int p, int& sign) {
  if (mask >> p & 1u) return false;
  if (std::popcount(mask & ((1u << p) - 1u)) % 2) sign = -sign;
  mask |= 1u << p;
  return true;
}

// <I| a+_p a_q |J>
int one_body_element(unsigned bra, unsigned ket, int p, int q) {
  int sign = 1;
  if (!annihilate(ket, q, sign) || !create(ket, p, sign)) return 0;
  return ket == bra ? sign : 0;
}

// <I| a+_p a+_r a_s a_q |J>
int two_body_element(unsigned bra, unsigned ket, int p, int q, int r, int s) {
  int sign = 1;
  if (!annihilate(ket, q, sign) || !annihilate(ket, s, sign)) return 0;
  if (!create(ket, r, sign) || !create(ket, p, sign)) return 0;
  return ket == bra ? sign : 0;
}

std::vector<int> bits(unsigned mask) {
  std::vector<int> out;
  for (int j = 0; mask >> j; ++j) {
    if (mask >> j & 1u) out.push_back(j);
  }
  return out;
}

}  // namespace

AngularCoupling coupling_for(const OrbitalSet& orbitals, int l_max) {
  for (const auto& o : orbitals.orbitals()) l_max = std::max(l_max, o.channel.l);
  return AngularCoupling(l_max);
}

IntegralTable::IntegralTable(const OrbitalSet& orbitals, double charge, const AngularCoupling& angular)
    : m_(orbitals.size()), h_(Eigen::MatrixXd::Zero(m_, m_)), g_(m_ * m_ * m_ * m_, 0.0), pairs_(m_ * m_) {
  const auto& grid = orbitals.grid();
  const auto v = nuclear_potential(grid, charge);
  for (std::size_t j = 0; j < m_; ++j) {
    const auto hu = apply_channel_hamiltonian(orbitals[j].u, orbitals[j].channel.l, v, grid);
    for (std::size_t i = 0; i < m_; ++i) {
      if (orbitals[i].channel == orbitals[j].channel) h_(i, j) = grid.inner(orbitals[i].u, hu);
    }
  }
  h_ = 0.5 * (h_ + h_.transpose()).eval();

  for (std::size_t k = 0; k < m_; ++k) {
    for (std::size_t l = k; l < m_; ++l) {
      pairs_[k * m_ + l] = poisson_multipole(orbitals[k], orbitals[l], grid, angular);
      if (l != k) {
        pairs_[l * m_ + k] = pairs_[k * m_ + l];
        std::swap(pairs_[l * m_ + k].a, pairs_[l * m_ + k].b);
      }
    }
  }
  std::vector<double> prod(grid.size());
  for (std::size_t i = 0; i < m_; ++i) {
    for (std::size_t j = 0; j < m_; ++j) {
      for (std::size_t n = 0; n < grid.size(); ++n) prod[n] = orbitals[i].u[n] * orbitals[j].u[n];
      const auto lams = angular.lambdas(orbitals[i].channel, orbitals[j].channel);
      for (std::size_t k = 0; k < m_; ++k) {
        for (std::size_t l = 0; l < m_; ++l) {
          const auto& pot = pairs_[k * m_ + l];
          double s = 0.0;
          for (int lam : lams) {
            if (!pot.has(lam)) continue;
            const double c = angular.coupling(lam, orbitals[i].channel, orbitals[j].channel, orbitals[k].channel,
                                              orbitals[l].channel);
            if (c != 0.0) s += c * grid.inner(prod, pot.components[lam]);
          }
          g_[((i * m_ + j) * m_ + k) * m_ + l] = s;
        }
      }
    }
  }
}

Eigen::MatrixXd slater_condon_matrix(const ConfigurationSet& cs, const IntegralTable& ints) {
  const std::size_t n = cs.size();
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t I = 0; I < n; ++I) {
    const unsigned bra = cs.mask(I);
    for (std::size_t J = 0; J <= I; ++J) {
      const unsigned ket = cs.mask(J);
      const int excitation = std::popcount(bra ^ ket) / 2;
      double value = 0.0;
      if (excitation == 0) {
        const auto occ = bits(bra);
        for (int i : occ) {
          value += ints.one_body(i, i);
          for (int j : occ) value += 0.5 * (ints.two_body(i, i, j, j) - ints.two_body(i, j, j, i));
        }
      } else if (excitation == 1) {
        const int p = bits(bra & ~ket)[0];
        const int q = bits(ket & ~bra)[0];
        double s = ints.one_body(p, q);
        for (int k : bits(bra & ket)) s += ints.two_body(p, q, k, k) - ints.two_body(p, k, k, q);
        value = one_body_element(bra, ket, p, q) * s;
      } else if (excitation == 2) {
        const auto pr = bits(bra & ~ket);
        const auto qs = bits(ket & ~bra);
        const int p = pr[0], r = pr[1], q = qs[0], s = qs[1];
        value = two_body_element(bra, ket, p, q, r, s) * (ints.two_body(p, q, r, s) - ints.two_body(p, s, r, q));
      }
      H(I, J) = H(J, I) = value;
    }
  }
  return H;
}

Eigen::MatrixXd second_quantized_matrix(const ConfigurationSet& cs, const IntegralTable& ints) {
  const std::size_t n = cs.size();
  const int m = cs.orbitals();
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t I = 0; I < n; ++I) {
    for (std::size_t J = 0; J < n; ++J) {
      const unsigned bra = cs.mask(I), ket = cs.mask(J);
      double v = 0.0;
      for (int p = 0; p < m; ++p) {
        for (int q = 0; q < m; ++q) {
          if (int e = one_body_element(bra, ket, p, q)) v += e * ints.one_body(p, q);
          for (int r = 0; r < m; ++r) {
            for (int s = 0; s < m; ++s) {
              if (int e = two_body_element(bra, ket, p, q, r, s)) v += 0.5 * e * ints.two_body(p, q, r, s);
            }
          }
        }
      }
      H(I, J) = v;
    }
  }
  return H;
}

Eigen::MatrixXd one_rdm(const ConfigurationSet& cs) {
  const int m = cs.orbitals();
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(m, m);
  for (std::size_t I = 0; I < cs.size(); ++I) {
    for (std::size_t J = 0; J < cs.size(); ++J) {
      const double cc = cs.coefficient(I) * cs.coefficient(J);
      if (cc == 0.0) continue;
      for (int p = 0; p < m; ++p) {
        for (int q = 0; q < m; ++q) {
          if (int e = one_body_element(cs.mask(I), cs.mask(J), p, q)) D(p, q) += e * cc;
        }
      }
    }
  }
  return D;
}

std::vector<double> two_rdm(const ConfigurationSet& cs) {
  const std::size_t m = cs.orbitals();
  auto idx = [m](std::size_t i, std::size_t j, std::size_t k, std::size_t l) { return ((i * m + j) * m + k) * m + l; };
  std::vector<double> P(m * m * m * m, 0.0);
  for (std::size_t I = 0; I < cs.size(); ++I) {
    for (std::size_t J = 0; J < cs.size(); ++J) {
      const double cc = cs.coefficient(I) * cs.coefficient(J);
      if (cc == 0.0) continue;
      for (std::size_t p = 0; p < m; ++p)
        for (std::size_t q = 0; q < m; ++q)
          for (std::size_t r = 0; r < m; ++r)
            for (std::size_t s = 0; s < m; ++s) {
              if (int e = two_body_element(cs.mask(I), cs.mask(J), p, q, r, s)) P[idx(p, q, r, s)] += e * cc;
            }
    }
  }
  std::vector<double> A(P.size());
  for (std::size_t p = 0; p < m; ++p)
    for (std::size_t q = 0; q < m; ++q)
      for (std::size_t r = 0; r < m; ++r)
        for (std::size_t s = 0; s < m; ++s) {
          A[idx(p, q, r, s)] = (P[idx(p, q, r, s)] + P[idx(q, p, r, s)] + P[idx(p, q, s, r)] + P[idx(q, p, s, r)] +
                                P[idx(r, s, p, q)] + P[idx(s, r, p, q)] + P[idx(r, s, q, p)] + P[idx(s, r, q, p)]) /
                               8.0;
        }
  return A;
}

std::vector<std::vector<double>> orbital_gradients(const OrbitalSet& orbitals, const IntegralTable& ints,
                                                   const Eigen::MatrixXd& D, const std::vector<double>& A,
                                                   double charge, const AngularCoupling& angular, bool accurate) {
  const std::size_t m = orbitals.size();
  const auto& grid = orbitals.grid();
  const std::size_t n = grid.size();
  const auto v = nuclear_potential(grid, charge);
  std::vector<std::vector<double>> hu(m);
  for (std::size_t j = 0; j < m; ++j) {
    hu[j] = accurate ? apply_channel_hamiltonian_accurate(orbitals[j].u, orbitals[j].channel.l, v, grid)
                     : apply_channel_hamiltonian(orbitals[j].u, orbitals[j].channel.l, v, grid);
  }

  std::vector<std::vector<double>> G(m, std::vector<double>(n, 0.0));
  std::vector<double> pot(n);
  for (std::size_t i = 0; i < m; ++i) {
    const Channel ci = orbitals[i].channel;
    for (std::size_t j = 0; j < m; ++j) {
      const Channel cj = orbitals[j].channel;
      if (cj == ci && D(i, j) != 0.0) {
        for (std::size_t t = 0; t < n; ++t) G[i][t] += D(i, j) * hu[j][t];
      }
      // total potential multiplying u_j
      std::fill(pot.begin(), pot.end(), 0.0);
      bool any = false;
      for (std::size_t k = 0; k < m; ++k) {
        for (std::size_t l = 0; l < m; ++l) {
          const double a = A[((i * m + j) * m + k) * m + l];
          if (a == 0.0) continue;
          const auto& pp = ints.pair(k, l);
          for (int lam : angular.lambdas(ci, cj)) {
            if (!pp.has(lam)) continue;
            const double c = angular.coupling(lam, ci, cj, orbitals[k].channel, orbitals[l].channel);
            if (c == 0.0) continue;
            any = true;
            for (std::size_t t = 0; t < n; ++t) pot[t] += a * c * pp.components[lam][t];
          }
        }
      }
      if (any) {
        for (std::size_t t = 0; t < n; ++t) G[i][t] += pot[t] * orbitals[j].u[t];
      }
    }
  }
  return G;
}

std::pair<double, std::vector<double>> lowest_ci_eigenpair(const Eigen::MatrixXd& H) {
  if ((H - H.transpose()).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, H.cwiseAbs().maxCoeff())) {
    throw InternalError("lowest_ci_eigenpair: matrix not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (H + H.transpose()));
  Eigen::VectorXd c = es.eigenvectors().col(0);
  Eigen::Index imax = 0;
  c.cwiseAbs().maxCoeff(&imax);
  if (c(imax) < 0) c = -c;
  return {es.eigenvalues()(0), std::vector<double>(c.data(), c.data() + c.size())};
}

ReducedCoefficients reduced_coefficients(const ConfigurationSet& cs, const OrbitalSet& orbitals,
                                         const NuclearFrame& frame) {
  if (static_cast<std::size_t>(cs.orbitals()) != orbitals.size()) {
    throw ConsistencyError("reduced_coefficients: configuration set and orbitals differ in M");
  }
  if (!frame.is_atom_at_origin()) {
    throw UnsupportedError("reduced_coefficients: radial orbitals need a single nucleus at the origin");
  }
  if (orbitals.orthonormality_error() > 1e-8) {
    throw ConsistencyError("reduced_coefficients: orbitals are not orthonormal");
  }
  const double z = frame[0].charge;
  const AngularCoupling angular = coupling_for(orbitals);
  const IntegralTable ints(orbitals, z, angular);

  ReducedCoefficients rc;
  rc.m = orbitals.size();
  rc.H_CI = slater_condon_matrix(cs, ints);
  std::tie(rc.E_CI, rc.ci_vector) = lowest_ci_eigenpair(rc.H_CI);
  const Eigen::Map<const Eigen::VectorXd> c(cs.coefficients().data(), static_cast<Eigen::Index>(cs.size()));
  rc.energy = c.dot(rc.H_CI * c);
  rc.one_rdm = one_rdm(cs);
  rc.gamma.resize(rc.m);
  for (std::size_t i = 0; i < rc.m; ++i) rc.gamma[i] = rc.one_rdm(i, i);
  rc.A = two_rdm(cs);

  const auto G = orbital_gradients(orbitals, ints, rc.one_rdm, rc.A, z, angular);
  rc.lambda = Eigen::MatrixXd::Zero(rc.m, rc.m);
  for (std::size_t i = 0; i < rc.m; ++i) {
    for (std::size_t j = 0; j < rc.m; ++j) {
      if (orbitals[i].channel == orbitals[j].channel) rc.lambda(i, j) = orbitals.grid().inner(orbitals[j].u, G[i]);
    }
  }
  return rc;
}

double configuration_energy(const ConfigurationSet& cs, const OrbitalSet& orbitals, const NuclearFrame& frame) {
  if (static_cast<std::size_t>(cs.orbitals()) != orbitals.size()) {
    throw ConsistencyError("configuration_energy: configuration set and orbitals differ in M");
  }
  if (!frame.is_atom_at_origin()) {
    throw UnsupportedError("configuration_energy: radial orbitals need a single nucleus at the origin");
  }
  if (orbitals.orthonormality_error() > 1e-8) {
    throw ConsistencyError("configuration_energy: orbitals are not orthonormal");
  }
  const AngularCoupling angular = coupling_for(orbitals);
  const IntegralTable ints(orbitals, frame[0].charge, angular);
  const Eigen::MatrixXd H = slater_condon_matrix(cs, ints);
  const Eigen::Map<const Eigen::VectorXd> c(cs.coefficients().data(), static_cast<Eigen::Index>(cs.size()));
  return c.dot(H * c);
}

}  // namespace ksatom
