#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <stdexcept>
#include <string>

namespace sgns {

using Vector = Eigen::VectorXd;
using DenseMatrix = Eigen::MatrixXd;

/// Compressed-row sparse matrix. Column indices within a row are sorted and unique
/// after construction through setFromTriplets or makeCompressed.
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;
using Triplet = Eigen::Triplet<double, int>;

/// Numerical failure inside a solver (singular factorization, breakdown, divergence).
class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

/// Largest absolute entry of A - A^T.
double asymmetry(const SparseMatrix& a);

}  // namespace sgns
