#include <stdexcept>
#include <string>

#include "sgns/galerkin.hpp"

namespace sgns {

GalerkinProblem make_galerkin_problem(std::shared_ptr<const Mesh> mesh, const StochasticViscosity& visc, int P,
                                      const BoundaryFunction& bc) {
  if (!mesh) throw std::invalid_argument("make_galerkin_problem: mesh is null");
  if (visc.num_nodes() != mesh->num_velocity_nodes())
    throw std::invalid_argument("make_galerkin_problem: viscosity has " + std::to_string(visc.num_nodes()) +
                                " nodal values, mesh has " + std::to_string(mesh->num_velocity_nodes()));
  if (P < 0 || visc.basis.P < P) throw std::invalid_argument("make_galerkin_problem: viscosity degree must be >= P");

  GalerkinProblem pr;
  pr.mesh = mesh;
  pr.basis = total_degree_indices(visc.basis.N, P);
  pr.coeff_basis = visc.basis;
  pr.h = std::make_shared<const TripleProductTensor>(triple_products(pr.basis, pr.coeff_basis));
  pr.layout = {pr.basis.size(), mesh->n_u(), mesh->n_p()};
  pr.dirichlet = dirichlet_dof_mask(*mesh);
  const auto gv = dirichlet_values(*mesh, bc);
  pr.g = Eigen::Map<const Vector>(gv.data(), static_cast<Eigen::Index>(gv.size()));
  pr.mean_viscosity = visc.coeffs[0];

  pr.A.reserve(static_cast<std::size_t>(visc.size()));
  for (int l = 0; l < visc.size(); ++l) {
    pr.A.push_back(assemble_weighted_laplacian(*mesh, visc.coeffs[l]));
    pr.A_constrained.push_back(
        std::make_shared<const SparseMatrix>(constrain_symmetric(pr.A.back(), pr.dirichlet, l == 0 ? 1.0 : 0.0)));
  }
  pr.B = assemble_divergence(*mesh);
  pr.B_constrained = zero_columns(pr.B, pr.dirichlet);
  pr.C = SparseMatrix(mesh->n_p(), mesh->n_p());
  pr.pin_pressure = mesh->enclosed();
  if (pr.pin_pressure) {
    std::vector<bool> pin(static_cast<std::size_t>(mesh->n_p()), false);
    pin[0] = true;
    pr.B_constrained = zero_rows(pr.B_constrained, pin);
    pr.C.insert(0, 0) = 1.0;
    pr.C.makeCompressed();
  }
  return pr;
}

Vector GalerkinProblem::rhs() const {
  Vector y = Vector::Zero(layout.ngdof());
  for (int i = 0; i < layout.n_u; ++i)
    if (dirichlet[i]) y[i] = g[i];
  return y;
}

StochasticSolution GalerkinProblem::lifted_zero() const {
  StochasticSolution v(layout);
  v.coeffs.head(layout.n_u) = g;
  return v;
}

GalerkinState::GalerkinState(const GalerkinProblem& problem) : GalerkinState(problem, problem.lifted_zero()) {}

GalerkinState::GalerkinState(const GalerkinProblem& problem, StochasticSolution v) : problem_(&problem) {
  set_iterate(std::move(v));
}

void GalerkinState::set_iterate(StochasticSolution v) {
  if (v.coeffs.size() != problem_->layout.ngdof()) throw std::invalid_argument("GalerkinState: iterate size mismatch");
  v_ = std::move(v);
  ++version_;
}

void GalerkinState::rebuild() {
  N_.clear();
  W_.clear();
  if (problem_->convection) {
    const auto& l = problem_->layout;
    for (int k = 0; k < l.M; ++k) {
      const Vector u = v_.coeffs.segment(l.offset(k), l.n_u);
      N_.push_back(assemble_convection(*problem_->mesh, u));
      W_.push_back(assemble_newton_derivative(*problem_->mesh, u));
    }
  }
  built_version_ = version_;
}

namespace {

KronSumOperator skeleton(const GalerkinProblem& pr) {
  KronSumOperator op;
  op.layout = pr.layout;
  op.h = pr.h;
  for (int l = 0; l < pr.coeff_basis.size(); ++l) op.degrees.push_back(pr.coeff_basis.degree(l));
  op.F = pr.A_constrained;
  op.B = pr.B_constrained;
  op.C = pr.C;
  return op;
}

}  // namespace

KronSumOperator build_stokes_operator(const GalerkinProblem& problem) { return skeleton(problem); }

KronSumOperator build_linearized_operator(const GalerkinState& state, Linearization mode) {
  const GalerkinProblem& pr = state.problem();
  KronSumOperator op = skeleton(pr);
  op.state_version = state.version();
  if (mode == Linearization::Stokes || !pr.convection) return op;
  if (!state.current()) throw std::logic_error("build_linearized_operator: convection matrices are stale; call rebuild()");
  for (int l = 0; l < pr.M() && l < op.M_nu(); ++l) {
    SparseMatrix f = pr.A[l] + state.N()[l];
    if (mode == Linearization::Newton) f += state.W()[l];
    op.F[l] = std::make_shared<const SparseMatrix>(constrain_symmetric(f, pr.dirichlet, l == 0 ? 1.0 : 0.0));
  }
  return op;
}

Vector global_residual(const GalerkinState& state, bool with_convection) {
  const GalerkinProblem& pr = state.problem();
  const bool convection = pr.convection && with_convection;
  if (convection && !state.current()) throw std::logic_error("global_residual: convection matrices are stale");
  const auto& l = pr.layout;
  const Vector& v = state.iterate().coeffs;
  Vector r = pr.rhs();
  const int nu = l.n_u, np = l.n_p;
  Vector w(nu);
  for (int ell = 0; ell < pr.M_nu(); ++ell) {
    const SparseMatrix& h = pr.h->H[ell];
    const bool has_n = convection && ell < l.M;
    for (int k = 0; k < l.M; ++k) {
      if (h.outerIndexPtr()[k + 1] == h.outerIndexPtr()[k]) continue;
      const auto uk = v.segment(l.offset(k), nu);
      w.noalias() = pr.A[ell] * uk;
      if (has_n) w.noalias() += state.N()[ell] * uk;
      for (SparseMatrix::InnerIterator it(h, k); it; ++it) r.segment(l.offset(static_cast<int>(it.col())), nu) -= it.value() * w;
    }
  }
  for (int k = 0; k < l.M; ++k) {
    const auto o = l.offset(k);
    r.segment(o, nu).noalias() -= pr.B.transpose() * v.segment(o + nu, np);
    r.segment(o + nu, np).noalias() -= pr.B * v.segment(o, nu);
    for (int i = 0; i < nu; ++i)
      if (pr.dirichlet[i]) r[o + i] = (k == 0 ? pr.g[i] : 0.0) - v[o + i];
    if (pr.pin_pressure) r[o + nu] = -v[o + nu];
  }
  return r;
}

}  // namespace sgns
