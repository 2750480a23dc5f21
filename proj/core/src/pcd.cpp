#include "sgns/krylov.hpp"

namespace sgns {

PcdPreconditioner::PcdPreconditioner(const SparseMatrix& F, const SparseMatrix& B, const PcdOperators& ops)
    : F_lu_(F), Ap_lu_(ops.Ap), Mp_lu_(ops.Mp), B_(B), Fp_(ops.Fp) {
  if (F.rows() != B.cols() || ops.Ap.rows() != B.rows())
    throw std::invalid_argument("PcdPreconditioner: block sizes do not match");
}

void PcdPreconditioner::apply(const double* in, double* out) const {
  const int nu = n_u(), np = n_p();
  Eigen::Map<const Vector> ru(in, nu), rp(in + nu, np);
  Eigen::Map<Vector> xu(out, nu), xp(out + nu, np);
  const Vector t = Fp_ * Ap_lu_.solve(Vector(rp));
  const Vector p = -Mp_lu_.solve(t);
  xu = F_lu_.solve(Vector(ru - B_.transpose() * p));
  xp = p;
}

}  // namespace sgns
