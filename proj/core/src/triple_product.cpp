#include <cmath>
#include <stdexcept>
#include <utility>

#include "sgns/gpc.hpp"

namespace sgns {

double hermite_triple_1d(int a, int b, int c) {
  if (a < 0 || b < 0 || c < 0) return 0.0;
  if ((a + b + c) % 2 != 0) return 0.0;
  const int s = (a + b + c) / 2;
  if (s < a || s < b || s < c) return 0.0;
  // Fixed argument order makes the value bitwise invariant under permutation.
  if (a > b) std::swap(a, b);
  if (b > c) std::swap(b, c);
  if (a > b) std::swap(a, b);
  // E[He_a He_b He_c] = a! b! c! / ((s-a)! (s-b)! (s-c)!); divide by sqrt(a! b! c!).
  const double log_v = 0.5 * (std::lgamma(a + 1.0) + std::lgamma(b + 1.0) + std::lgamma(c + 1.0)) -
                       std::lgamma(s - a + 1.0) - std::lgamma(s - b + 1.0) - std::lgamma(s - c + 1.0);
  return std::exp(log_v);
}

long long TripleProductTensor::nnz_total() const {
  long long n = 0;
  for (const auto& m : H) n += m.nonZeros();
  return n;
}

TripleProductTensor triple_products(const MultiIndexSet& solution, const MultiIndexSet& coefficient) {
  if (solution.N != coefficient.N) throw std::invalid_argument("triple_products: dimension mismatch");
  const int N = solution.N;
  const int M = solution.size();
  const int top = std::max(solution.P, coefficient.P);
  // Univariate factors, tabulated once.
  std::vector<double> table(static_cast<std::size_t>((top + 1) * (top + 1) * (top + 1)));
  auto at = [top](int a, int b, int c) { return (a * (top + 1) + b) * (top + 1) + c; };
  for (int a = 0; a <= top; ++a)
    for (int b = 0; b <= top; ++b)
      for (int c = 0; c <= top; ++c) table[at(a, b, c)] = hermite_triple_1d(a, b, c);

  TripleProductTensor t;
  t.M = M;
  t.M_nu = coefficient.size();
  t.H.reserve(static_cast<std::size_t>(t.M_nu));
  std::vector<Triplet> trip;
  for (int l = 0; l < t.M_nu; ++l) {
    trip.clear();
    const auto& al = coefficient[l];
    for (int j = 0; j < M; ++j) {
      for (int k = 0; k < M; ++k) {
        double v = 1.0;
        for (int d = 0; d < N && v != 0.0; ++d) v *= table[at(al[d], solution[j][d], solution[k][d])];
        if (v != 0.0) trip.emplace_back(j, k, v);
      }
    }
    SparseMatrix h(M, M);
    h.setFromTriplets(trip.begin(), trip.end());
    h.makeCompressed();
    t.H.push_back(std::move(h));
  }
  return t;
}

TripleProductTensor triple_products(int N, int P_solution, int P_coefficient) {
  return triple_products(total_degree_indices(N, P_solution), total_degree_indices(N, P_coefficient));
}

long long coupling_nnz(const TripleProductTensor& h, const MultiIndexSet& solution, int M_t) {
  if (M_t < 0 || M_t > h.M_nu) throw std::invalid_argument("coupling_nnz: M_t out of range");
  long long n = 0;
  for (int l = 0; l < M_t; ++l) {
    const auto& m = h.H[l];
    for (int j = 0; j < m.outerSize(); ++j)
      for (SparseMatrix::InnerIterator it(m, j); it; ++it)
        if (solution.degree(static_cast<int>(it.col())) < solution.degree(j)) ++n;
  }
  return n;
}

}  // namespace sgns
