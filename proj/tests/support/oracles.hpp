#pragma once

// Independent reference implementations used only by tests. None of these call into the
// library's numerics; they work on dense matrices and textbook formulas.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

/// Unpreconditioned GMRES, modified Gram-Schmidt Arnoldi, least squares by dense QR at every
/// step. Returns ||b - A x_k|| / ||b|| for k = 0 .. iters.
inline std::vector<double> dense_gmres_history(const Mat& A, const Vec& b, int iters) {
  const double bn = b.norm();
  const int n = static_cast<int>(b.size());
  Mat V = Mat::Zero(n, iters + 1);
  Mat H = Mat::Zero(iters + 1, iters);
  V.col(0) = b / bn;
  std::vector<double> hist{1.0};
  for (int k = 0; k < iters; ++k) {
    Vec w = A * V.col(k);
    for (int i = 0; i <= k; ++i) {
      H(i, k) = w.dot(V.col(i));
      w -= H(i, k) * V.col(i);
    }
    H(k + 1, k) = w.norm();
    if (H(k + 1, k) > 0) V.col(k + 1) = w / H(k + 1, k);
    const Mat Hk = H.topLeftCorner(k + 2, k + 1);
    Vec e1 = Vec::Zero(k + 2);
    e1(0) = bn;
    const Vec y = Hk.colPivHouseholderQr().solve(e1);
    const Vec x = V.leftCols(k + 1) * y;
    hist.push_back((b - A * x).norm() / bn);
    if (H(k + 1, k) == 0) break;
  }
  return hist;
}

/// sum_l kron(H_l, F_l) with the stochastic index as the outer (block) index.
inline Mat dense_kron_sum(const std::vector<Mat>& H, const std::vector<Mat>& F) {
  const Eigen::Index M = H[0].rows(), b = F[0].rows();
  Mat out = Mat::Zero(M * b, M * b);
  for (std::size_t l = 0; l < H.size(); ++l)
    for (Eigen::Index j = 0; j < M; ++j)
      for (Eigen::Index k = 0; k < M; ++k)
        if (H[l](j, k) != 0.0) out.block(j * b, k * b, b, b) += H[l](j, k) * F[l];
  return out;
}

/// Coefficients (ascending powers) of the probabilists' Hermite polynomial He_n, by the
/// recurrence He_{n+1} = x He_n - n He_{n-1}.
inline std::vector<double> hermite_coeffs(int n) {
  std::vector<double> a{1.0}, b{0.0, 1.0};
  if (n == 0) return a;
  for (int m = 1; m < n; ++m) {
    std::vector<double> c(static_cast<std::size_t>(m) + 2, 0.0);
    for (std::size_t i = 0; i < b.size(); ++i) c[i + 1] += b[i];
    for (std::size_t i = 0; i < a.size(); ++i) c[i] -= m * a[i];
    a = b;
    b = c;
  }
  return b;
}

/// E[x^n] for x ~ N(0, 1).
inline double normal_moment(int n) {
  if (n % 2) return 0.0;
  double m = 1.0;
  for (int k = n - 1; k > 1; k -= 2) m *= k;
  return m;
}

/// E[psi_a psi_b psi_c] for normalized Hermite polynomials via polynomial multiplication and
/// Gaussian moments.
inline double triple_1d(int a, int b, int c) {
  const auto pa = hermite_coeffs(a), pb = hermite_coeffs(b), pc = hermite_coeffs(c);
  std::vector<double> ab(pa.size() + pb.size() - 1, 0.0);
  for (std::size_t i = 0; i < pa.size(); ++i)
    for (std::size_t j = 0; j < pb.size(); ++j) ab[i + j] += pa[i] * pb[j];
  double s = 0.0;
  for (std::size_t i = 0; i < ab.size(); ++i)
    for (std::size_t j = 0; j < pc.size(); ++j) s += ab[i] * pc[j] * normal_moment(static_cast<int>(i + j));
  auto fact = [](int n) {
    double f = 1.0;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
  };
  return s / std::sqrt(fact(a) * fact(b) * fact(c));
}

/// Value of the normalized Hermite polynomial from its monomial coefficients.
inline double hermite_value(int n, double x) {
  const auto c = hermite_coeffs(n);
  double v = 0.0, xp = 1.0;
  for (double ci : c) {
    v += ci * xp;
    xp *= x;
  }
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return v / std::sqrt(f);
}

/// Eigenvalues (descending) of C W v = lambda v with symmetric C and positive diagonal W,
/// through the symmetric form W^{1/2} C W^{1/2}.
inline Vec weighted_kernel_eigenvalues(const Mat& C, const Vec& w) {
  const Vec s = w.array().sqrt();
  const Mat S = s.asDiagonal() * C * s.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Mat> es(S, Eigen::EigenvaluesOnly);
  return es.eigenvalues().reverse();
}

/// Forward-difference directional derivative of a vector function.
inline Vec fd_derivative(const std::function<Vec(const Vec&)>& f, const Vec& x, const Vec& d, double eps) {
  return (f(x + eps * d) - f(x)) / eps;
}

/// Standard normal density.
inline double normal_pdf(double x, double mu, double sd) {
  const double z = (x - mu) / sd;
  return std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * M_PI));
}

}  // namespace oracle
