#include <cmath>
#include <stdexcept>

#include "sgns/krylov.hpp"

namespace sgns {

FgmresResult fgmres(const LinearMap& op, const LinearMap& precond, const Vector& rhs, const FgmresConfig& cfg,
                    const Vector* x0) {
  if (!(cfg.tol > 0.0) || cfg.max_iter < 1) throw std::invalid_argument("fgmres: need tol > 0 and max_iter >= 1");
  const Eigen::Index n = rhs.size();
  FgmresResult res;
  res.x = x0 ? *x0 : Vector::Zero(n);
  if (res.x.size() != n) throw std::invalid_argument("fgmres: initial guess size mismatch");
  const double bnorm = rhs.norm();
  if (bnorm == 0.0) {
    res.x.setZero();
    res.converged = true;
    res.history = {0.0};
    return res;
  }

  Vector r(n), w(n);
  if (x0) {
    op(res.x, w);
    r = rhs - w;
  } else {
    r = rhs;
  }
  double beta = r.norm();
  res.history.push_back(beta / bnorm);
  if (beta <= cfg.tol * bnorm) {
    res.converged = true;
    res.true_relative_residual = beta / bnorm;
    return res;
  }

  const int m = cfg.restart > 0 ? cfg.restart : cfg.max_iter;
  std::vector<Vector> V, Z;
  DenseMatrix H;
  Vector cs, sn, g;
  while (true) {
    const int cycle = std::min(m, cfg.max_iter - res.iterations);
    V.assign(1, r / beta);
    Z.clear();
    H = DenseMatrix::Zero(cycle + 1, cycle);
    cs = Vector::Zero(cycle);
    sn = Vector::Zero(cycle);
    g = Vector::Zero(cycle + 1);
    g[0] = beta;
    int i = 0;
    bool done = false;
    bool breakdown_exit = false;
    for (; i < cycle; ++i) {
      Vector z(n);
      if (precond) {
        precond(V[i], z);
      } else {
        z = V[i];
      }
      op(z, w);
      Z.push_back(std::move(z));
      for (int k = 0; k <= i; ++k) {
        H(k, i) = V[k].dot(w);
        w -= H(k, i) * V[k];
      }
      H(i + 1, i) = w.norm();
      for (int k = 0; k < i; ++k) {
        const double t = cs[k] * H(k, i) + sn[k] * H(k + 1, i);
        H(k + 1, i) = -sn[k] * H(k, i) + cs[k] * H(k + 1, i);
        H(k, i) = t;
      }
      const double a = H(i, i), b = H(i + 1, i);
      const double rho = std::hypot(a, b);
      const bool zero = !(rho > 0.0);
      cs[i] = zero ? 1.0 : a / rho;
      sn[i] = zero ? 0.0 : b / rho;
      const double hnext = b;
      H(i, i) = rho;
      H(i + 1, i) = 0.0;
      g[i + 1] = -sn[i] * g[i];
      g[i] = cs[i] * g[i];
      ++res.iterations;
      const double est = std::abs(g[i + 1]);
      res.history.push_back(est / bnorm);
      if (!std::isfinite(est)) throw SolverError("fgmres: non-finite residual");
      if (est <= cfg.tol * bnorm) {
        res.converged = true;
        ++i;
        done = true;
        break;
      }
      if (hnext <= 1e-14 * rho) {
        // Breakdown: the Krylov space is invariant; judge by the true residual below.
        breakdown_exit = true;
        ++i;
        done = true;
        break;
      }
      if (res.iterations >= cfg.max_iter) {
        ++i;
        done = true;
        break;
      }
      V.push_back(w / hnext);
    }
    // y = H(0:i, 0:i)^{-1} g(0:i)
    Vector y = H.topLeftCorner(i, i).triangularView<Eigen::Upper>().solve(g.head(i));
    for (int k = 0; k < i; ++k) res.x += y[k] * Z[k];
    op(res.x, w);
    r = rhs - w;
    beta = r.norm();
    if (breakdown_exit) res.converged = beta <= cfg.tol * bnorm;
    if (done || res.iterations >= cfg.max_iter) break;
    if (beta <= cfg.tol * bnorm) {
      res.converged = true;
      break;
    }
  }
  res.true_relative_residual = beta / bnorm;
  return res;
}

}  // namespace sgns
