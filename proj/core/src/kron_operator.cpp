#include <algorithm>
#include <stdexcept>
#include <string>

#include "sgns/galerkin.hpp"

namespace sgns {

void KronSumOperator::apply_block(int l, const double* x, double* y, double alpha) const {
  const int nu = layout.n_u, np = layout.n_p;
  Eigen::Map<const Vector> xu(x, nu), xp(x + nu, np);
  Eigen::Map<Vector> yu(y, nu), yp(y + nu, np);
  yu.noalias() += alpha * (*F[l] * xu);
  if (l == 0) {
    yu.noalias() += alpha * (B.transpose() * xp);
    yp.noalias() += alpha * (B * xu);
    if (C.nonZeros() > 0) yp.noalias() += alpha * (C * xp);
  }
  ++block_applications;
}

SparseMatrix KronSumOperator::assembled_block(int l) const {
  if (l == 0) return assemble_saddle(*F[0], B, C);
  SparseMatrix z(layout.n_p, layout.n_u);
  SparseMatrix zc(layout.n_p, layout.n_p);
  return assemble_saddle(*F[l], z, zc);
}

int KronSumOperator::truncation_size(int l_t) const {
  if (l_t < 0) return M_nu();
  int n = 0;
  for (int d : degrees)
    if (d <= l_t) ++n;
  return n;
}

void kron_accumulate(const KronSumOperator& op, const Vector& x, Vector& y, int j0, int j1, int k0, int k1, int M_t,
                     double alpha) {
  const auto& l = op.layout;
  if (x.size() != l.ngdof() || y.size() != l.ngdof()) throw std::invalid_argument("kron_accumulate: size mismatch");
  if (M_t < 0 || M_t > op.M_nu()) M_t = op.M_nu();
  const int bs = l.block();
  Vector w(bs);
  for (int ell = 0; ell < M_t; ++ell) {
    const SparseMatrix& h = op.h->H[ell];
    for (int k = k0; k < k1; ++k) {
      // H_l is symmetric: row k lists the rows j coupled to column k.
      bool any = false;
      for (SparseMatrix::InnerIterator it(h, k); it; ++it)
        if (it.col() >= j0 && it.col() < j1) {
          any = true;
          break;
        }
      if (!any) continue;
      w.setZero();
      op.apply_block(ell, x.data() + l.offset(k), w.data());
      for (SparseMatrix::InnerIterator it(h, k); it; ++it) {
        const int j = static_cast<int>(it.col());
        if (j >= j0 && j < j1) y.segment(l.offset(j), bs).noalias() += (alpha * it.value()) * w;
      }
    }
  }
}

Vector kron_matvec(const KronSumOperator& op, const Vector& x, int M_t) {
  if (x.size() != op.layout.ngdof())
    throw std::invalid_argument("kron_matvec: vector length " + std::to_string(x.size()) + " != ngdof " +
                                std::to_string(op.layout.ngdof()));
  Vector y = Vector::Zero(x.size());
  kron_accumulate(op, x, y, 0, op.layout.M, 0, op.layout.M, M_t);
  return y;
}

SparseMatrix assemble_global(const KronSumOperator& op, int M_t) {
  if (M_t < 0 || M_t > op.M_nu()) M_t = op.M_nu();
  const int bs = op.layout.block();
  std::vector<Triplet> trip;
  for (int ell = 0; ell < M_t; ++ell) {
    const SparseMatrix blk = op.assembled_block(ell);
    const SparseMatrix& h = op.h->H[ell];
    for (int j = 0; j < h.outerSize(); ++j) {
      for (SparseMatrix::InnerIterator hit(h, j); hit; ++hit) {
        const int k = static_cast<int>(hit.col());
        for (int r = 0; r < blk.outerSize(); ++r)
          for (SparseMatrix::InnerIterator it(blk, r); it; ++it)
            trip.emplace_back(j * bs + r, k * bs + static_cast<int>(it.col()), hit.value() * it.value());
      }
    }
  }
  const int n = static_cast<int>(op.layout.ngdof());
  SparseMatrix g(n, n);
  g.setFromTriplets(trip.begin(), trip.end());
  g.makeCompressed();
  return g;
}

}  // namespace sgns
