#pragma once

#include <span>
#include <string>
#include <vector>

#include "sgns/sparse.hpp"

namespace sgns {

using MultiIndex = std::vector<int>;

/// Binomial coefficient C(n, k) in exact integer arithmetic.
long long binomial(int n, int k);

/// Total-degree multi-index set { alpha in N^N : |alpha| <= P } in graded order.
/// Within one degree indices are sorted lexicographically in decreasing order,
/// e.g. (2,0), (1,1), (0,2). Index 0 is always the zero multi-index.
struct MultiIndexSet {
  int N = 0;
  int P = 0;
  std::vector<MultiIndex> indices;

  int size() const { return static_cast<int>(indices.size()); }
  const MultiIndex& operator[](int k) const { return indices[k]; }
  int degree(int k) const;
  /// Position of alpha, or -1.
  int find(const MultiIndex& alpha) const;
  /// offsets[d] is the first position of degree d; offsets[P + 1] == size().
  std::vector<int> degree_offsets() const;
};

MultiIndexSet total_degree_indices(int N, int P);

/// Normalized probabilists' Hermite polynomial He_n(x) / sqrt(n!).
double hermite_1d(int n, double x);
/// Values psi_0(x) .. psi_nmax(x).
std::vector<double> hermite_1d_all(int nmax, double x);

/// prod_d He_{alpha_d}(xi_d) / sqrt(alpha_d!). Throws std::invalid_argument on dimension mismatch.
double hermite_eval(const MultiIndex& alpha, std::span<const double> xi);
/// Values of every basis polynomial of the set at xi.
Vector evaluate_basis(const MultiIndexSet& set, std::span<const double> xi);

/// E[psi_a psi_b psi_c] for normalized univariate Hermite polynomials (closed form).
double hermite_triple_1d(int a, int b, int c);

/// Matrices H_l (l < M_nu), each M x M with entries E[psi_l psi_j psi_k].
struct TripleProductTensor {
  int M = 0;
  int M_nu = 0;
  std::vector<SparseMatrix> H;

  long long nnz_total() const;
};

/// Closed-form construction: per-dimension Hermite linearization coefficients.
TripleProductTensor triple_products(const MultiIndexSet& solution, const MultiIndexSet& coefficient);
TripleProductTensor triple_products(int N, int P_solution, int P_coefficient);

/// Nonzeros (j, k) of H_l with deg(k) < deg(j), summed over l < M_t. These are the entries the
/// degree-blocked Gauss-Seidel coupling sweeps touch.
long long coupling_nnz(const TripleProductTensor& h, const MultiIndexSet& solution, int M_t);

struct QuadratureRule {
  int N = 0;
  /// points[q] has N coordinates.
  std::vector<std::vector<double>> points;
  std::vector<double> weights;
  std::string kind;  // "tensor" or "smolyak"
  int order = 0;     // points per dimension (tensor) or level (smolyak)

  int size() const { return static_cast<int>(weights.size()); }
};

/// Gauss-Hermite rule for the standard normal measure with n points (weights sum to 1).
QuadratureRule gauss_hermite_1d(int n);
/// Tensor product of n-point rules in N dimensions; exact for degree <= 2n - 1 per dimension.
QuadratureRule gauss_hermite_rule(int n, int N);
/// Smolyak combination of Gauss-Hermite rules with linear growth m(i) = i. Coincident
/// points are merged. Exact for total degree <= 2 level - 1.
QuadratureRule smolyak_rule(int level, int N);

}  // namespace sgns
