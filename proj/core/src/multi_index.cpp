#include <algorithm>
#include <functional>
#include <numeric>
#include <stdexcept>

#include "sgns/gpc.hpp"

namespace sgns {

long long binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  k = std::min(k, n - k);
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

int MultiIndexSet::degree(int k) const {
  const auto& a = indices[k];
  return std::accumulate(a.begin(), a.end(), 0);
}

int MultiIndexSet::find(const MultiIndex& alpha) const {
  if (static_cast<int>(alpha.size()) != N) return -1;
  const int d = std::accumulate(alpha.begin(), alpha.end(), 0);
  if (d > P) return -1;
  const auto off = degree_offsets();
  // Within a degree block the order is decreasing lexicographic.
  auto first = indices.begin() + off[d], last = indices.begin() + off[d + 1];
  auto it = std::lower_bound(first, last, alpha, std::greater<MultiIndex>());
  return (it != last && *it == alpha) ? static_cast<int>(it - indices.begin()) : -1;
}

std::vector<int> MultiIndexSet::degree_offsets() const {
  std::vector<int> off(static_cast<std::size_t>(P) + 2);
  // Number of indices of degree < d is C(N + d - 1, N).
  for (int d = 1; d <= P + 1; ++d) off[d] = static_cast<int>(binomial(N + d - 1, N));
  return off;
}

namespace {

// All alpha with |alpha| == d, in decreasing lexicographic order.
void append_degree(int N, int d, std::vector<MultiIndex>& out) {
  MultiIndex a(static_cast<std::size_t>(N), 0);
  std::function<void(int, int)> rec = [&](int pos, int left) {
    if (pos == N - 1) {
      a[pos] = left;
      out.push_back(a);
      return;
    }
    for (int v = left; v >= 0; --v) {
      a[pos] = v;
      rec(pos + 1, left - v);
    }
  };
  rec(0, d);
}

}  // namespace

MultiIndexSet total_degree_indices(int N, int P) {
  if (N < 1 || P < 0) throw std::invalid_argument("total_degree_indices: need N >= 1 and P >= 0");
  MultiIndexSet s;
  s.N = N;
  s.P = P;
  s.indices.reserve(static_cast<std::size_t>(binomial(N + P, P)));
  for (int d = 0; d <= P; ++d) append_degree(N, d, s.indices);
  return s;
}

}  // namespace sgns
