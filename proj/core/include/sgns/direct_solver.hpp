#pragma once

#include <memory>

#include "sgns/sparse.hpp"

namespace sgns {

/// Sparse LU with partial pivoting, factored once and reused for many right-hand sides.
/// Backed by UMFPACK when available, Eigen::SparseLU otherwise.
class SparseLU {
 public:
  SparseLU();
  explicit SparseLU(const SparseMatrix& a);
  ~SparseLU();
  SparseLU(SparseLU&&) noexcept;
  SparseLU& operator=(SparseLU&&) noexcept;

  /// Throws SolverError if the matrix is structurally or numerically singular.
  void factor(const SparseMatrix& a);
  bool factored() const;
  int size() const;

  Vector solve(const Vector& b) const;
  /// Solves for every column of b.
  DenseMatrix solve(const DenseMatrix& b) const;

  static const char* backend();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace sgns
