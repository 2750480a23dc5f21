#include "sgns/random_field.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

namespace sgns {

Vector lumped_q2_weights_1d(int n_cells, double h) {
  Vector w = Vector::Zero(2 * n_cells + 1);
  for (int e = 0; e < n_cells; ++e) {
    w[2 * e] += h / 6.0;
    w[2 * e + 1] += 2.0 * h / 3.0;
    w[2 * e + 2] += h / 6.0;
  }
  return w;
}

KL1D exponential_kernel_eigen(const Vector& points, const Vector& weights, double L) {
  const Eigen::Index n = points.size();
  const Vector sw = weights.cwiseSqrt();
  DenseMatrix K(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) K(i, j) = sw[i] * std::exp(-std::abs(points[i] - points[j]) / L) * sw[j];
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(K);
  KL1D out;
  out.eigenvalues = es.eigenvalues().reverse();
  out.eigenvectors = es.eigenvectors().rowwise().reverse();
  for (Eigen::Index j = 0; j < n; ++j) {
    out.eigenvectors.col(j) = out.eigenvectors.col(j).cwiseQuotient(sw);
    // Fix the sign so the largest-magnitude entry is positive (deterministic across platforms).
    Eigen::Index imax;
    out.eigenvectors.col(j).cwiseAbs().maxCoeff(&imax);
    if (out.eigenvectors(imax, j) < 0) out.eigenvectors.col(j) *= -1.0;
  }
  return out;
}

KLExpansion discrete_kl(const CovarianceSpec& cov, const Mesh& mesh, int N, double g0) {
  if (!(cov.sigma_g >= 0.0) || !(cov.Lx > 0.0) || !(cov.Ly > 0.0))
    throw std::invalid_argument("discrete_kl: need sigma_g >= 0 and positive correlation lengths");
  const int nv = mesh.num_velocity_nodes();
  if (N < 1 || N > nv) throw std::invalid_argument("discrete_kl: N must be in [1, number of nodes]");

  const int li = 2 * mesh.nx + 1, lj = 2 * mesh.ny + 1;
  const double hx = (mesh.domain.x1 - mesh.domain.x0) / mesh.nx;
  const double hy = (mesh.domain.y1 - mesh.domain.y0) / mesh.ny;
  Vector xs(li), ys(lj);
  for (int i = 0; i < li; ++i) xs[i] = mesh.domain.x0 + 0.5 * hx * i;
  for (int j = 0; j < lj; ++j) ys[j] = mesh.domain.y0 + 0.5 * hy * j;
  const KL1D ex = exponential_kernel_eigen(xs, lumped_q2_weights_1d(mesh.nx, hx), cov.Lx);
  const KL1D ey = exponential_kernel_eigen(ys, lumped_q2_weights_1d(mesh.ny, hy), cov.Ly);

  // Largest products lambda_x(a) lambda_y(b); a and b beyond N never enter the top N.
  struct Pair {
    double lambda;
    int a, b;
  };
  std::vector<Pair> pairs;
  for (int a = 0; a < std::min<int>(N, li); ++a)
    for (int b = 0; b < std::min<int>(N, lj); ++b)
      pairs.push_back({ex.eigenvalues[a] * ey.eigenvalues[b], a, b});
  std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& p, const Pair& q) { return p.lambda > q.lambda; });
  if (static_cast<int>(pairs.size()) < N) throw std::invalid_argument("discrete_kl: lattice too small for N modes");

  const double var = cov.sigma_g * cov.sigma_g;
  KLExpansion kl;
  kl.g0 = NodalField::Constant(nv, g0);
  for (int m = 0; m < N; ++m) {
    const Pair& pr = pairs[m];
    if (!(pr.lambda > 1e-12 * ex.eigenvalues[0] * ey.eigenvalues[0]))
      throw SolverError("discrete_kl: non-positive eigenvalue for mode " + std::to_string(m));
    NodalField g(nv);
    for (int n = 0; n < nv; ++n) {
      const auto& ij = mesh.lattice[n];
      g[n] = ex.eigenvectors(ij[0], pr.a) * ey.eigenvectors(ij[1], pr.b);
    }
    kl.eigenvalues.push_back(var * pr.lambda);
    kl.modes.push_back(std::sqrt(var * pr.lambda) * g);
  }

  if (var > 0.0) {
    NodalField sum_sq = NodalField::Zero(nv);
    for (const auto& g : kl.modes) sum_sq += g.cwiseProduct(g);
    const double avg = integrate(mesh, sum_sq) / mesh.area();
    kl.variance_scale = std::sqrt(var / avg);
    for (auto& g : kl.modes) g *= kl.variance_scale;
  }
  return kl;
}

LognormalParameters calibrate_sigma(double cov, double mean_viscosity) {
  if (!(cov >= 0.0 && cov < 1.0)) throw std::invalid_argument("calibrate_sigma: CoV must satisfy 0 <= CoV < 1");
  if (!(mean_viscosity > 0.0)) throw std::invalid_argument("calibrate_sigma: mean viscosity must be positive");
  LognormalParameters p;
  p.sigma_g = std::sqrt(std::log1p(cov * cov));
  p.g0 = std::log(mean_viscosity) - 0.5 * p.sigma_g * p.sigma_g;
  return p;
}

StochasticViscosity lognormal_gpc_coeffs(const KLExpansion& kl, const MultiIndexSet& basis, ShiftedMoment method) {
  const int N = static_cast<int>(kl.modes.size());
  if (N != basis.N)
    throw std::invalid_argument("lognormal_gpc_coeffs: basis dimension " + std::to_string(basis.N) +
                                " != KL mode count " + std::to_string(N));
  const int nv = static_cast<int>(kl.g0.size());
  const int P = basis.P;
  // psi_k(x + g) has degree <= P; P + 2 points integrate it exactly.
  const QuadratureRule rule = gauss_hermite_1d(P + 2);

  StochasticViscosity v;
  v.basis = basis;
  v.coeffs.assign(static_cast<std::size_t>(basis.size()), NodalField::Zero(nv));
  std::vector<std::vector<double>> moments(static_cast<std::size_t>(N));
  for (int n = 0; n < nv; ++n) {
    double s = kl.g0[n];
    for (int d = 0; d < N; ++d) {
      const double g = kl.modes[d][n];
      s += 0.5 * g * g;
      auto& m = moments[d];
      m.assign(static_cast<std::size_t>(P) + 1, 0.0);
      if (method == ShiftedMoment::Quadrature) {
        for (int q = 0; q < rule.size(); ++q) {
          const auto psi = hermite_1d_all(P, rule.points[q][0] + g);
          for (int k = 0; k <= P; ++k) m[k] += rule.weights[q] * psi[k];
        }
      } else {
        double gk = 1.0, fact = 1.0;
        for (int k = 0; k <= P; ++k) {
          if (k > 0) {
            gk *= g;
            fact *= k;
          }
          m[k] = gk / std::sqrt(fact);
        }
      }
    }
    const double scale = std::exp(s);
    for (int l = 0; l < basis.size(); ++l) {
      double e = scale;
      for (int d = 0; d < N; ++d) e *= moments[d][basis[l][d]];
      v.coeffs[l][n] = e;
    }
  }
  return v;
}

StochasticViscosity constant_viscosity(const MultiIndexSet& basis, int num_nodes, double nu) {
  StochasticViscosity v;
  v.basis = basis;
  v.coeffs.assign(static_cast<std::size_t>(basis.size()), NodalField::Zero(num_nodes));
  v.coeffs[0].setConstant(nu);
  v.mean = nu;
  return v;
}

NodalField sample_viscosity(const StochasticViscosity& visc, std::span<const double> xi, int* negative_count) {
  const Vector psi = evaluate_basis(visc.basis, xi);
  NodalField out = NodalField::Zero(visc.num_nodes());
  for (int l = 0; l < visc.size(); ++l)
    if (psi[l] != 0.0) out += psi[l] * visc.coeffs[l];
  if (negative_count) *negative_count = static_cast<int>((out.array() <= 0.0).count());
  return out;
}

}  // namespace sgns
