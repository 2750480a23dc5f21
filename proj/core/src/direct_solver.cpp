#include "sgns/direct_solver.hpp"

#include <cmath>
#include <string>

#ifdef SGNS_HAVE_UMFPACK
#include <Eigen/UmfPackSupport>
#else
#include <Eigen/SparseLU>
#endif

namespace sgns {

namespace {
using ColMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
#ifdef SGNS_HAVE_UMFPACK
using Backend = Eigen::UmfPackLU<ColMatrix>;
#else
using Backend = Eigen::SparseLU<ColMatrix, Eigen::COLAMDOrdering<int>>;
#endif
}  // namespace

struct SparseLU::Impl {
  ColMatrix matrix;
  Backend lu;
};

SparseLU::SparseLU() = default;
SparseLU::SparseLU(const SparseMatrix& a) { factor(a); }
SparseLU::~SparseLU() = default;
SparseLU::SparseLU(SparseLU&&) noexcept = default;
SparseLU& SparseLU::operator=(SparseLU&&) noexcept = default;

void SparseLU::factor(const SparseMatrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("SparseLU: matrix must be square");
  auto impl = std::make_unique<Impl>();
  impl->matrix = ColMatrix(a);
  impl->matrix.makeCompressed();
  impl->lu.compute(impl->matrix);
  if (impl->lu.info() != Eigen::Success)
    throw SolverError("SparseLU: factorization failed (singular matrix of order " + std::to_string(a.rows()) + ")");
  impl_ = std::move(impl);
}

bool SparseLU::factored() const { return impl_ != nullptr; }
int SparseLU::size() const { return impl_ ? static_cast<int>(impl_->matrix.rows()) : 0; }

Vector SparseLU::solve(const Vector& b) const {
  if (!impl_) throw std::logic_error("SparseLU::solve before factor");
  if (b.size() != impl_->matrix.rows()) throw std::invalid_argument("SparseLU::solve: size mismatch");
  Vector x = impl_->lu.solve(b);
  if (!x.allFinite()) throw SolverError("SparseLU::solve produced non-finite values");
  return x;
}

DenseMatrix SparseLU::solve(const DenseMatrix& b) const {
  if (!impl_) throw std::logic_error("SparseLU::solve before factor");
  if (b.rows() != impl_->matrix.rows()) throw std::invalid_argument("SparseLU::solve: size mismatch");
  DenseMatrix x = impl_->lu.solve(b);
  if (!x.allFinite()) throw SolverError("SparseLU::solve produced non-finite values");
  return x;
}

const char* SparseLU::backend() {
#ifdef SGNS_HAVE_UMFPACK
  return "umfpack";
#else
  return "eigen-sparselu";
#endif
}

}  // namespace sgns
