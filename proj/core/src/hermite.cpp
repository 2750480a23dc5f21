#include <cmath>
#include <stdexcept>

#include "sgns/gpc.hpp"

namespace sgns {

std::vector<double> hermite_1d_all(int nmax, double x) {
  if (nmax < 0) throw std::invalid_argument("hermite_1d_all: negative degree");
  // Normalized recurrence: psi_{n+1} = (x psi_n - sqrt(n) psi_{n-1}) / sqrt(n+1).
  std::vector<double> v(static_cast<std::size_t>(nmax) + 1);
  v[0] = 1.0;
  if (nmax >= 1) v[1] = x;
  for (int n = 1; n < nmax; ++n) v[n + 1] = (x * v[n] - std::sqrt(static_cast<double>(n)) * v[n - 1]) / std::sqrt(n + 1.0);
  return v;
}

double hermite_1d(int n, double x) { return hermite_1d_all(n, x)[n]; }

double hermite_eval(const MultiIndex& alpha, std::span<const double> xi) {
  if (alpha.size() != xi.size())
    throw std::invalid_argument("hermite_eval: multi-index has " + std::to_string(alpha.size()) +
                                " entries but the point has " + std::to_string(xi.size()));
  double v = 1.0;
  for (std::size_t d = 0; d < alpha.size(); ++d) v *= hermite_1d(alpha[d], xi[d]);
  return v;
}

Vector evaluate_basis(const MultiIndexSet& set, std::span<const double> xi) {
  if (static_cast<int>(xi.size()) != set.N)
    throw std::invalid_argument("evaluate_basis: point dimension " + std::to_string(xi.size()) + " != " +
                                std::to_string(set.N));
  std::vector<std::vector<double>> per_dim(static_cast<std::size_t>(set.N));
  for (int d = 0; d < set.N; ++d) per_dim[d] = hermite_1d_all(set.P, xi[d]);
  Vector out(set.size());
  for (int k = 0; k < set.size(); ++k) {
    double v = 1.0;
    for (int d = 0; d < set.N; ++d) v *= per_dim[d][set[k][d]];
    out[k] = v;
  }
  return out;
}

}  // namespace sgns
