#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "sgns/gpc.hpp"

namespace sgns {

QuadratureRule gauss_hermite_1d(int n) {
  if (n < 1) throw std::invalid_argument("gauss_hermite_1d: need n >= 1");
  // Golub-Welsch on the Jacobi matrix of the monic probabilists' Hermite recurrence.
  DenseMatrix J = DenseMatrix::Zero(n, n);
  for (int k = 1; k < n; ++k) J(k, k - 1) = J(k - 1, k) = std::sqrt(static_cast<double>(k));
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(J);
  QuadratureRule r;
  r.N = 1;
  r.kind = "tensor";
  r.order = n;
  for (int i = 0; i < n; ++i) {
    double x = es.eigenvalues()[i];
    // Symmetrize so the rule is exactly odd-symmetric and has an exact zero node.
    const int mirror = n - 1 - i;
    x = 0.5 * (x - es.eigenvalues()[mirror]);
    const double w = 0.5 * (es.eigenvectors()(0, i) * es.eigenvectors()(0, i) +
                            es.eigenvectors()(0, mirror) * es.eigenvectors()(0, mirror));
    r.points.push_back({x});
    r.weights.push_back(w);
  }
  const double s = std::accumulate(r.weights.begin(), r.weights.end(), 0.0);
  for (auto& w : r.weights) w /= s;
  return r;
}

namespace {

void tensor_accumulate(const std::vector<QuadratureRule>& rules, double scale, std::vector<std::vector<double>>& pts,
                       std::vector<double>& wts) {
  const int N = static_cast<int>(rules.size());
  std::vector<int> idx(static_cast<std::size_t>(N), 0);
  while (true) {
    std::vector<double> p(static_cast<std::size_t>(N));
    double w = scale;
    for (int d = 0; d < N; ++d) {
      p[d] = rules[d].points[idx[d]][0];
      w *= rules[d].weights[idx[d]];
    }
    pts.push_back(std::move(p));
    wts.push_back(w);
    int d = 0;
    while (d < N && ++idx[d] == rules[d].size()) idx[d++] = 0;
    if (d == N) break;
  }
}

}  // namespace

QuadratureRule gauss_hermite_rule(int n, int N) {
  if (n < 1 || N < 1) throw std::invalid_argument("gauss_hermite_rule: need n >= 1 and N >= 1");
  const QuadratureRule one = gauss_hermite_1d(n);
  QuadratureRule r;
  r.N = N;
  r.kind = "tensor";
  r.order = n;
  tensor_accumulate(std::vector<QuadratureRule>(static_cast<std::size_t>(N), one), 1.0, r.points, r.weights);
  return r;
}

QuadratureRule smolyak_rule(int level, int N) {
  if (level < 1 || N < 1) throw std::invalid_argument("smolyak_rule: need level >= 1 and N >= 1");
  std::vector<QuadratureRule> oned;
  for (int i = 1; i <= level; ++i) oned.push_back(gauss_hermite_1d(i));

  // sum over level <= |i| <= level + N - 1 (i_d >= 1) of
  // (-1)^(level + N - 1 - |i|) C(N - 1, level + N - 1 - |i|) (U^{i_1} x ... x U^{i_N})
  const int q = level + N - 1;
  std::map<std::vector<double>, double> merged;
  std::vector<int> idx(static_cast<std::size_t>(N), 1);
  while (true) {
    const int norm = std::accumulate(idx.begin(), idx.end(), 0);
    if (norm >= level && norm <= q) {
      const int k = q - norm;
      const double c = ((k % 2) ? -1.0 : 1.0) * static_cast<double>(binomial(N - 1, k));
      std::vector<QuadratureRule> rules;
      for (int d = 0; d < N; ++d) rules.push_back(oned[idx[d] - 1]);
      std::vector<std::vector<double>> pts;
      std::vector<double> wts;
      tensor_accumulate(rules, c, pts, wts);
      for (std::size_t a = 0; a < pts.size(); ++a) {
        for (auto& x : pts[a])
          if (std::abs(x) < 1e-14) x = 0.0;
        merged[pts[a]] += wts[a];
      }
    }
    int d = 0;
    while (d < N && ++idx[d] > level) idx[d++] = 1;
    if (d == N) break;
  }

  QuadratureRule r;
  r.N = N;
  r.kind = "smolyak";
  r.order = level;
  for (const auto& [p, w] : merged) {
    if (w == 0.0) continue;
    r.points.push_back(p);
    r.weights.push_back(w);
  }
  return r;
}

}  // namespace sgns
