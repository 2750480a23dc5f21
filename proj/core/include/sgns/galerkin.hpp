#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "sgns/fem.hpp"
#include "sgns/gpc.hpp"
#include "sgns/mesh.hpp"
#include "sgns/random_field.hpp"

namespace sgns {

/// Sizes of the interleaved coefficient vector: for each stochastic index k the velocity
/// coefficients u_k (n_u) followed by the pressure coefficients p_k (n_p).
struct BlockLayout {
  int M = 1;
  int n_u = 0;
  int n_p = 0;

  int block() const { return n_u + n_p; }
  long long ngdof() const { return static_cast<long long>(M) * block(); }
  Eigen::Index offset(int k) const { return static_cast<Eigen::Index>(k) * block(); }
};

struct ModePair {
  Vector u;
  Vector p;
};

struct StochasticSolution {
  BlockLayout layout;
  Vector coeffs;

  StochasticSolution() = default;
  explicit StochasticSolution(const BlockLayout& l) : layout(l), coeffs(Vector::Zero(l.ngdof())) {}
  StochasticSolution(const BlockLayout& l, Vector v);
};

/// Throws std::out_of_range unless 0 <= k < M.
ModePair mode_extract(const StochasticSolution& v, int k);
void mode_inject(StochasticSolution& v, int k, const ModePair& mode);

/// Reorder to [u_0 .. u_{M-1}, p_0 .. p_{M-1}] and back.
Vector to_field_major(const StochasticSolution& v);
StochasticSolution from_field_major(const BlockLayout& layout, const Vector& x);

/// Everything about one stochastic Navier-Stokes problem that does not depend on the iterate.
struct GalerkinProblem {
  std::shared_ptr<const Mesh> mesh;
  MultiIndexSet basis;        // degree P, size M
  MultiIndexSet coeff_basis;  // degree 2P, size M_nu
  std::shared_ptr<const TripleProductTensor> h;
  BlockLayout layout;

  /// Weighted Laplacians of the viscosity coefficients, before boundary conditions.
  std::vector<SparseMatrix> A;
  /// The same with Dirichlet rows/columns removed (diagonal 1 for l = 0, 0 otherwise).
  std::vector<std::shared_ptr<const SparseMatrix>> A_constrained;
  SparseMatrix B;              // unconstrained divergence
  SparseMatrix B_constrained;  // Dirichlet columns (and a pinned pressure row) removed
  SparseMatrix C;              // n_p x n_p, 1 at a pinned pressure dof
  std::vector<bool> dirichlet;
  Vector g;  // Dirichlet data on velocity dofs (zero elsewhere)
  bool pin_pressure = false;
  bool convection = true;  // false: stochastic Stokes only
  NodalField mean_viscosity;

  int M() const { return layout.M; }
  int M_nu() const { return h->M_nu; }

  /// Global right-hand side y: g at mode-0 Dirichlet rows, zero elsewhere (no body force).
  Vector rhs() const;
  /// Mode 0 carries the Dirichlet data, every other coefficient is zero.
  StochasticSolution lifted_zero() const;
};

/// Precompute everything for a problem with solution degree P. The viscosity must be expanded
/// in the degree-2P (or any degree >= P) basis of the same dimension.
GalerkinProblem make_galerkin_problem(std::shared_ptr<const Mesh> mesh, const StochasticViscosity& visc, int P,
                                      const BoundaryFunction& bc);

enum class Linearization { Stokes, Picard, Newton };

/// Iterate v^n together with the convection matrices it defines.
class GalerkinState {
 public:
  explicit GalerkinState(const GalerkinProblem& problem);
  GalerkinState(const GalerkinProblem& problem, StochasticSolution v);

  const GalerkinProblem& problem() const { return *problem_; }
  const StochasticSolution& iterate() const { return v_; }
  /// Replace the iterate. The convection matrices become stale until rebuild().
  void set_iterate(StochasticSolution v);
  /// Reassemble N_l, W_l (l < M) from the current iterate.
  void rebuild();
  bool current() const { return built_version_ == version_; }
  std::uint64_t version() const { return version_; }

  /// Unconstrained N(u_l), W(u_l); empty when not built or convection is off.
  const std::vector<SparseMatrix>& N() const { return N_; }
  const std::vector<SparseMatrix>& W() const { return W_; }

 private:
  const GalerkinProblem* problem_;
  StochasticSolution v_;
  std::vector<SparseMatrix> N_, W_;
  std::uint64_t version_ = 1;
  std::uint64_t built_version_ = 0;
};

/// Sum_l H_l (x) calF_l with calF_0 = [F_0 B^T; B C] and calF_l = [F_l 0; 0 0] for l > 0.
/// Blocks are Dirichlet-constrained. apply counters are mutable diagnostics.
class KronSumOperator {
 public:
  BlockLayout layout;
  std::shared_ptr<const TripleProductTensor> h;
  std::vector<int> degrees;  // gPC degree of each coefficient index l
  std::vector<std::shared_ptr<const SparseMatrix>> F;  // size M_nu (velocity blocks)
  SparseMatrix B;  // constrained, n_p x n_u
  SparseMatrix C;  // n_p x n_p
  std::uint64_t state_version = 0;

  int M_nu() const { return static_cast<int>(F.size()); }
  /// y += alpha calF_l x for one stochastic block (length n_u + n_p).
  void apply_block(int l, const double* x, double* y, double alpha = 1.0) const;
  /// Assembled calF_l as an (n_u + n_p) square sparse matrix.
  SparseMatrix assembled_block(int l) const;
  /// Number of M_t for a degree cutoff l_t: C(N + l_t, l_t), capped at M_nu.
  int truncation_size(int l_t) const;

  mutable std::uint64_t block_applications = 0;
};

KronSumOperator build_stokes_operator(const GalerkinProblem& problem);
/// Throws std::logic_error if the state's matrices are stale.
KronSumOperator build_linearized_operator(const GalerkinState& state, Linearization mode);

/// y = sum_{l < M_t} sum_{j,k} h_{l,jk} calF_l x_k. M_t < 0 means all l.
Vector kron_matvec(const KronSumOperator& op, const Vector& x, int M_t = -1);

/// y_j += alpha sum_{l < M_t} sum_{k in [k0, k1)} h_{l,jk} calF_l x_k for rows j in [j0, j1).
/// Each calF_l is applied at most once per (l, k); the h-scaled result is scattered to the rows.
void kron_accumulate(const KronSumOperator& op, const Vector& x, Vector& y, int j0, int j1, int k0, int k1, int M_t,
                     double alpha = 1.0);

/// Explicit sparse sum_l H_l (x) calF_l (test oracle and small direct solves).
SparseMatrix assemble_global(const KronSumOperator& op, int M_t = -1);

/// R = y - sum_l H_l (x) calP_l v with calP_l = [A_l + N_l, B^T; B, 0] (unconstrained). Dirichlet
/// rows hold g - v_D in mode 0 and -v_D elsewhere; a pinned pressure row holds -p.
/// with_convection = false gives the Stokes residual (N_l dropped).
Vector global_residual(const GalerkinState& state, bool with_convection = true);

}  // namespace sgns
