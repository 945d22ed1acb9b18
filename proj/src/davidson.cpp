#include "davidson.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "ksatom/errors.hpp"

namespace ksatom::detail {

namespace {

double b_dot(const TridiagonalPencil& p, const std::vector<double>& a, const std::vector<double>& b) {
  const auto m = p.mass();
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += m[i] * a[i] * b[i];
  return s;
}

// B-orthogonalizes v against basis (two passes) and normalizes; false if v
// is numerically dependent.
bool orthonormalize(const TridiagonalPencil& p, const std::vector<std::vector<double>>& basis,
                    std::vector<double>& v) {
  const double n0 = std::sqrt(b_dot(p, v, v));
  if (!(n0 > 0.0) || !std::isfinite(n0)) return false;
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& q : basis) {
      const double c = b_dot(p, q, v);
      for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * q[i];
    }
  }
  const double n1 = std::sqrt(b_dot(p, v, v));
  if (!(n1 > 1e-10 * n0)) return false;
  for (double& x : v) x /= n1;
  return true;
}

}  // namespace

std::vector<double> apply_problem(const ChannelProblem& p, const std::vector<double>& x, bool with_shift) {
  std::vector<double> y = p.local->apply(x);
  if (p.nonlocal) p.nonlocal(x, y);
  if (with_shift && p.shift != 0.0) {
    const auto m = p.local->mass();
    std::vector<double> bx(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) bx[i] = m[i] * x[i];
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += p.shift * bx[i];
    for (const auto& w : p.occupied) {
      double c = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) c += w[i] * bx[i];
      for (std::size_t i = 0; i < x.size(); ++i) y[i] -= p.shift * c * m[i] * w[i];
    }
  }
  return y;
}

DavidsonResult davidson(const ChannelProblem& p, std::size_t count, std::vector<std::vector<double>> guess,
                        std::size_t tight_count, double tol, double loose_tol, int max_iterations) {
  const TridiagonalPencil& pencil = *p.local;
  const std::size_t n = pencil.size();
  const auto mass = pencil.mass();
  const std::size_t max_basis = std::max<std::size_t>(4 * count + 8, 24);

  std::vector<std::vector<double>> V, AV;
  for (auto& g : guess) {
    if (g.size() != n) throw ConsistencyError("davidson: guess size mismatch");
    if (orthonormalize(pencil, V, g)) {
      AV.push_back(apply_problem(p, g));
      V.push_back(std::move(g));
    }
  }
  // fill up with eigenvectors of the local part
  for (std::size_t k = 0; V.size() < count && k < n; ++k) {
    auto v = pencil.eigenvector(pencil.eigenvalue(k));
    if (orthonormalize(pencil, V, v)) {
      AV.push_back(apply_problem(p, v));
      V.push_back(std::move(v));
    }
  }
  if (V.size() < count) throw InternalError("davidson: could not build a starting basis");

  DavidsonResult out;
  for (int it = 0;; ++it) {
    const auto m = static_cast<Eigen::Index>(V.size());
    Eigen::MatrixXd S(m, m);
    for (Eigen::Index a = 0; a < m; ++a) {
      for (Eigen::Index b = 0; b <= a; ++b) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += V[a][i] * AV[b][i];
        S(a, b) = S(b, a) = s;
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
    out.theta.assign(count, 0.0);
    out.vectors.assign(count, std::vector<double>(n, 0.0));
    out.residual.assign(count, 0.0);
    std::vector<std::vector<double>> ax(count, std::vector<double>(n, 0.0));
    std::vector<std::vector<double>> rho(count, std::vector<double>(n));
    bool done = true;
    for (std::size_t k = 0; k < count; ++k) {
      out.theta[k] = es.eigenvalues()(k);
      for (Eigen::Index a = 0; a < m; ++a) {
        const double y = es.eigenvectors()(a, k);
        for (std::size_t i = 0; i < n; ++i) {
          out.vectors[k][i] += y * V[a][i];
          ax[k][i] += y * AV[a][i];
        }
      }
      double r2 = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        rho[k][i] = ax[k][i] - out.theta[k] * mass[i] * out.vectors[k][i];
        const double wgt = p.residual_weight ? (*p.residual_weight)[i] : 1.0;
        r2 += wgt * rho[k][i] * rho[k][i];
      }
      out.residual[k] = std::sqrt(r2);
      if (out.residual[k] > (k < tight_count ? tol : loose_tol)) done = false;
    }
    out.iterations = it;
    if (done || it >= max_iterations) return out;

    if (V.size() + count > max_basis) {
      V = out.vectors;
      AV = ax;
    }
    const std::size_t n_occ = p.occupied.size();
    const std::size_t before = V.size();
    for (std::size_t k = 0; k < count; ++k) {
      if (out.residual[k] <= (k < tight_count ? tol : loose_tol)) continue;
      const double s = k >= n_occ ? p.shift : 0.0;
      const double shift = out.theta[k] - s;
      std::vector<double> bx(n);
      for (std::size_t i = 0; i < n; ++i) bx[i] = mass[i] * out.vectors[k][i];
      const auto mr = pencil.solve_shifted(shift, rho[k]);
      const auto mb = pencil.solve_shifted(shift, bx);
      double num = 0.0, den = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        num += bx[i] * mr[i];
        den += bx[i] * mb[i];
      }
      const double eps = den != 0.0 ? num / den : 0.0;
      std::vector<double> t(n);
      for (std::size_t i = 0; i < n; ++i) t[i] = mr[i] - eps * mb[i];
      if (orthonormalize(pencil, V, t)) {
        AV.push_back(apply_problem(p, t));
        V.push_back(std::move(t));
      }
    }
    if (V.size() == before) return out;
  }
}

}  // namespace ksatom::detail
