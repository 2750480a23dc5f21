#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "sgns/direct_solver.hpp"
#include "sgns/fem.hpp"
#include "sgns/galerkin.hpp"

namespace sgns {

struct FgmresConfig {
  double tol = 1e-8;  // relative to ||rhs||
  int max_iter = 1000;
  int restart = 0;  // 0: no restart
};

struct FgmresResult {
  Vector x;
  int iterations = 0;
  bool converged = false;
  /// Relative residual estimates ||r_k|| / ||rhs|| for k = 0 .. iterations.
  std::vector<double> history;
  /// ||rhs - A x|| / ||rhs|| recomputed at exit.
  double true_relative_residual = 0.0;
};

/// out = op(in); out is resized by the callee if needed.
using LinearMap = std::function<void(const Vector& in, Vector& out)>;

/// Right-preconditioned flexible GMRES (Givens rotations, zero initial guess unless x0 given).
/// An empty precond means the identity. Not converging within max_iter is reported through
/// `converged`, not an exception; the returned x is the last (smallest-residual) iterate.
FgmresResult fgmres(const LinearMap& op, const LinearMap& precond, const Vector& rhs, const FgmresConfig& cfg,
                    const Vector* x0 = nullptr);

/// Block upper-triangular PCD preconditioner for one saddle block [F B^T; B 0]:
///   p = -Mp^{-1} Fp Ap^{-1} r_p,  u = F^{-1} (r_u - B^T p).
class PcdPreconditioner {
 public:
  PcdPreconditioner(const SparseMatrix& F, const SparseMatrix& B, const PcdOperators& ops);
  /// in and out hold one (n_u + n_p) block.
  void apply(const double* in, double* out) const;
  int n_u() const { return static_cast<int>(B_.cols()); }
  int n_p() const { return static_cast<int>(B_.rows()); }

 private:
  SparseLU F_lu_, Ap_lu_, Mp_lu_;
  SparseMatrix B_, Fp_;
};

enum class PrecondKind { MB, K, BGS, AHGS, AHGS_PCD, AHGS_PCD_IT };
const char* to_string(PrecondKind k);
PrecondKind precond_from_string(const std::string& s);

struct PreconditionerSpec {
  PrecondKind kind = PrecondKind::AHGS;
  /// Highest gPC degree of H_l used in the coupling products; negative means all (2P).
  int l_t = -1;
  int inner_iters = 20;  // ahGS-PCD-it
};

/// Applies an approximation of the inverse of one diagonal stochastic block.
class BlockSolver {
 public:
  virtual ~BlockSolver() = default;
  /// x ~= (block j)^{-1} r; both hold n_u + n_p values.
  virtual void solve(int j, const double* r, double* x) const = 0;
  mutable long long solves = 0;
};

/// Exact solve with the mean block calF_0 (LU factored once).
std::unique_ptr<BlockSolver> make_direct_mean_solver(const KronSumOperator& op);
/// One PCD application built from calF_0.
std::unique_ptr<BlockSolver> make_pcd_apply_solver(const KronSumOperator& op, const PcdOperators& pcd);
/// k steps of PCD-preconditioned GMRES on the diagonal block sum_l h_{l,jj} calF_l.
std::unique_ptr<BlockSolver> make_pcd_inner_gmres_solver(const KronSumOperator& op, const PcdOperators& pcd, int k);

class Preconditioner {
 public:
  virtual ~Preconditioner() = default;
  virtual void apply(const Vector& in, Vector& out) const = 0;
  virtual std::string name() const = 0;
  LinearMap as_map() const {
    return [this](const Vector& in, Vector& out) { apply(in, out); };
  }
};

/// Kronecker factor  H0hat = sum_l [tr(F_l^T F_0) / tr(F_0^T F_0)] H_l  over the velocity blocks.
DenseMatrix kronecker_factor(const KronSumOperator& op);

/// Preconditioner of the given kind for op. PCD kinds need pcd operators; the others ignore them.
/// The operator must outlive the preconditioner.
std::unique_ptr<Preconditioner> make_preconditioner(const KronSumOperator& op, const PreconditionerSpec& spec,
                                                    const PcdOperators* pcd = nullptr);

/// Hierarchical blocking: positions of each degree in the solution basis.
struct HierarchicalBlocking {
  std::vector<int> offsets;  // offsets[d] .. offsets[d+1]-1 have degree d
  int degrees() const { return static_cast<int>(offsets.size()) - 1; }
};
HierarchicalBlocking hierarchical_blocking(const MultiIndexSet& basis);

LinearMap operator_map(const KronSumOperator& op, int M_t = -1);

}  // namespace sgns
