#include <cmath>
#include <iostream>
#include <stdexcept>

#include <Eigen/LU>

#include "sgns/krylov.hpp"

namespace sgns {

const char* to_string(PrecondKind k) {
  switch (k) {
    case PrecondKind::MB: return "mb";
    case PrecondKind::K: return "k";
    case PrecondKind::BGS: return "bgs";
    case PrecondKind::AHGS: return "ahgs";
    case PrecondKind::AHGS_PCD: return "ahgs-pcd";
    case PrecondKind::AHGS_PCD_IT: return "ahgs-pcd-it";
  }
  return "?";
}

PrecondKind precond_from_string(const std::string& s) {
  for (auto k : {PrecondKind::MB, PrecondKind::K, PrecondKind::BGS, PrecondKind::AHGS, PrecondKind::AHGS_PCD,
                 PrecondKind::AHGS_PCD_IT})
    if (s == to_string(k)) return k;
  throw std::invalid_argument("unknown preconditioner '" + s + "' (expected mb|k|bgs|ahgs|ahgs-pcd|ahgs-pcd-it)");
}

LinearMap operator_map(const KronSumOperator& op, int M_t) {
  return [&op, M_t](const Vector& in, Vector& out) { out = kron_matvec(op, in, M_t); };
}

HierarchicalBlocking hierarchical_blocking(const MultiIndexSet& basis) { return {basis.degree_offsets()}; }

namespace {

HierarchicalBlocking blocking_of(const KronSumOperator& op) {
  HierarchicalBlocking b;
  b.offsets.push_back(0);
  for (int k = 1; k < op.layout.M; ++k)
    if (op.degrees[k] != op.degrees[k - 1]) b.offsets.push_back(k);
  b.offsets.push_back(op.layout.M);
  return b;
}

class DirectMeanSolver final : public BlockSolver {
 public:
  explicit DirectMeanSolver(const KronSumOperator& op) : lu_(op.assembled_block(0)), bs_(op.layout.block()) {}
  void solve(int, const double* r, double* x) const override {
    Eigen::Map<Vector>(x, bs_) = lu_.solve(Vector(Eigen::Map<const Vector>(r, bs_)));
    ++solves;
  }

 private:
  SparseLU lu_;
  int bs_;
};

class PcdApplySolver final : public BlockSolver {
 public:
  PcdApplySolver(const KronSumOperator& op, const PcdOperators& pcd) : pcd_(*op.F[0], op.B, pcd) {}
  void solve(int, const double* r, double* x) const override {
    pcd_.apply(r, x);
    ++solves;
  }

 private:
  PcdPreconditioner pcd_;
};

class PcdInnerGmresSolver final : public BlockSolver {
 public:
  PcdInnerGmresSolver(const KronSumOperator& op, const PcdOperators& pcd, int k) : op_(op), pcd_(*op.F[0], op.B, pcd), k_(k) {
    if (k < 1) throw std::invalid_argument("inner GMRES needs at least one step");
    diag_.resize(static_cast<std::size_t>(op.layout.M));
    for (int l = 0; l < op.M_nu(); ++l) {
      const SparseMatrix& h = op.h->H[l];
      for (int j = 0; j < op.layout.M; ++j) {
        const double v = h.coeff(j, j);
        if (v != 0.0) diag_[j].push_back({l, v});
      }
    }
  }
  void solve(int j, const double* r, double* x) const override {
    const int bs = op_.layout.block();
    LinearMap A = [&](const Vector& in, Vector& out) {
      out = Vector::Zero(bs);
      for (const auto& [l, v] : diag_[j]) op_.apply_block(l, in.data(), out.data(), v);
    };
    LinearMap P = [&](const Vector& in, Vector& out) {
      out.resize(bs);
      pcd_.apply(in.data(), out.data());
    };
    FgmresConfig cfg;
    cfg.tol = 1e-12;
    cfg.max_iter = k_;
    const auto res = fgmres(A, P, Vector(Eigen::Map<const Vector>(r, bs)), cfg);
    Eigen::Map<Vector>(x, bs) = res.x;
    ++solves;
  }

 private:
  struct Term {
    int l;
    double h;
  };
  const KronSumOperator& op_;
  PcdPreconditioner pcd_;
  int k_;
  std::vector<std::vector<Term>> diag_;
};

class MeanBased final : public Preconditioner {
 public:
  MeanBased(const KronSumOperator& op, std::unique_ptr<BlockSolver> s) : op_(op), s_(std::move(s)) {}
  void apply(const Vector& in, Vector& out) const override {
    const auto& l = op_.layout;
    out.resize(in.size());
    for (int k = 0; k < l.M; ++k) s_->solve(k, in.data() + l.offset(k), out.data() + l.offset(k));
  }
  std::string name() const override { return "mb"; }

 private:
  const KronSumOperator& op_;
  std::unique_ptr<BlockSolver> s_;
};

class Kronecker final : public Preconditioner {
 public:
  Kronecker(const KronSumOperator& op, std::unique_ptr<BlockSolver> s) : op_(op), s_(std::move(s)) {
    const DenseMatrix h0 = kronecker_factor(op);
    lu_.compute(h0);
    const double rc = lu_.rcond();
    if (!(rc > 1e-14) || !h0.allFinite()) {
      std::cerr << "warning: Kronecker factor is singular (rcond " << rc << "); falling back to mean-based\n";
      fallback_ = true;
    }
    inv_ = fallback_ ? DenseMatrix::Identity(op.layout.M, op.layout.M) : DenseMatrix(lu_.inverse());
  }
  void apply(const Vector& in, Vector& out) const override {
    const auto& l = op_.layout;
    const int bs = l.block();
    Vector z(in.size());
    for (int k = 0; k < l.M; ++k) s_->solve(k, in.data() + l.offset(k), z.data() + l.offset(k));
    out = Vector::Zero(in.size());
    for (int j = 0; j < l.M; ++j)
      for (int k = 0; k < l.M; ++k)
        if (inv_(j, k) != 0.0) out.segment(l.offset(j), bs) += inv_(j, k) * z.segment(l.offset(k), bs);
  }
  std::string name() const override { return "k"; }

 private:
  const KronSumOperator& op_;
  std::unique_ptr<BlockSolver> s_;
  Eigen::PartialPivLU<DenseMatrix> lu_;
  DenseMatrix inv_;
  bool fallback_ = false;
};

class BlockGaussSeidel final : public Preconditioner {
 public:
  BlockGaussSeidel(const KronSumOperator& op, std::unique_ptr<BlockSolver> s) : op_(op), s_(std::move(s)) {}
  void apply(const Vector& in, Vector& out) const override {
    const auto& l = op_.layout;
    out = Vector::Zero(in.size());
    Vector rhs = in;
    for (int j = 0; j < l.M; ++j) {
      kron_accumulate(op_, out, rhs, j, j + 1, 0, j, -1, -1.0);
      s_->solve(j, rhs.data() + l.offset(j), out.data() + l.offset(j));
    }
  }
  std::string name() const override { return "bgs"; }

 private:
  const KronSumOperator& op_;
  std::unique_ptr<BlockSolver> s_;
};

class HierarchicalGaussSeidel final : public Preconditioner {
 public:
  HierarchicalGaussSeidel(const KronSumOperator& op, std::unique_ptr<BlockSolver> s, int l_t, std::string name)
      : op_(op), s_(std::move(s)), blocking_(blocking_of(op)), M_t_(op.truncation_size(l_t)), name_(std::move(name)) {}
  void apply(const Vector& in, Vector& out) const override {
    const auto& l = op_.layout;
    out = Vector::Zero(in.size());
    Vector rhs = in;
    for (int d = 0; d < blocking_.degrees(); ++d) {
      const int j0 = blocking_.offsets[d], j1 = blocking_.offsets[d + 1];
      if (d > 0) kron_accumulate(op_, out, rhs, j0, j1, 0, j0, M_t_, -1.0);
      for (int j = j0; j < j1; ++j) s_->solve(j, rhs.data() + l.offset(j), out.data() + l.offset(j));
    }
  }
  std::string name() const override { return name_; }

 private:
  const KronSumOperator& op_;
  std::unique_ptr<BlockSolver> s_;
  HierarchicalBlocking blocking_;
  int M_t_;
  std::string name_;
};

}  // namespace

std::unique_ptr<BlockSolver> make_direct_mean_solver(const KronSumOperator& op) {
  return std::make_unique<DirectMeanSolver>(op);
}
std::unique_ptr<BlockSolver> make_pcd_apply_solver(const KronSumOperator& op, const PcdOperators& pcd) {
  return std::make_unique<PcdApplySolver>(op, pcd);
}
std::unique_ptr<BlockSolver> make_pcd_inner_gmres_solver(const KronSumOperator& op, const PcdOperators& pcd, int k) {
  return std::make_unique<PcdInnerGmresSolver>(op, pcd, k);
}

DenseMatrix kronecker_factor(const KronSumOperator& op) {
  const SparseMatrix& f0 = *op.F[0];
  const double denom = f0.cwiseProduct(f0).sum();
  const int M = op.layout.M;
  DenseMatrix h0 = DenseMatrix::Zero(M, M);
  for (int l = 0; l < op.M_nu(); ++l) {
    const double c = (l == 0) ? 1.0 : op.F[l]->cwiseProduct(f0).sum() / denom;
    if (c == 0.0) continue;
    const SparseMatrix& h = op.h->H[l];
    for (int j = 0; j < h.outerSize(); ++j)
      for (SparseMatrix::InnerIterator it(h, j); it; ++it) h0(j, it.col()) += c * it.value();
  }
  return h0;
}

std::unique_ptr<Preconditioner> make_preconditioner(const KronSumOperator& op, const PreconditionerSpec& spec,
                                                    const PcdOperators* pcd) {
  const bool needs_pcd = spec.kind == PrecondKind::AHGS_PCD || spec.kind == PrecondKind::AHGS_PCD_IT;
  if (needs_pcd && !pcd) throw std::invalid_argument(std::string(to_string(spec.kind)) + " needs PCD operators");
  switch (spec.kind) {
    case PrecondKind::MB: return std::make_unique<MeanBased>(op, make_direct_mean_solver(op));
    case PrecondKind::K: return std::make_unique<Kronecker>(op, make_direct_mean_solver(op));
    case PrecondKind::BGS: return std::make_unique<BlockGaussSeidel>(op, make_direct_mean_solver(op));
    case PrecondKind::AHGS:
      return std::make_unique<HierarchicalGaussSeidel>(op, make_direct_mean_solver(op), spec.l_t, "ahgs");
    case PrecondKind::AHGS_PCD:
      return std::make_unique<HierarchicalGaussSeidel>(op, make_pcd_apply_solver(op, *pcd), spec.l_t, "ahgs-pcd");
    case PrecondKind::AHGS_PCD_IT:
      return std::make_unique<HierarchicalGaussSeidel>(op, make_pcd_inner_gmres_solver(op, *pcd, spec.inner_iters),
                                                       spec.l_t, "ahgs-pcd-it");
  }
  throw std::invalid_argument("make_preconditioner: unknown kind");
}

}  // namespace sgns
