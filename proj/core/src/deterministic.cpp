#include <chrono>
#include <cmath>

#include "sgns/direct_solver.hpp"
#include "sgns/nonlinear.hpp"

namespace sgns {

Vector deterministic_residual(const Mesh& mesh, const SparseMatrix& A, const SparseMatrix& B, const Vector& g,
                              const std::vector<bool>& dirichlet, bool convection, const Vector& u, const Vector& p) {
  const int nu = static_cast<int>(u.size()), np = static_cast<int>(p.size());
  Vector r(nu + np);
  Vector ru = -(A * u) - B.transpose() * p;
  if (convection) ru -= assemble_convection(mesh, u) * u;
  r.head(nu) = ru;
  r.tail(np) = -(B * u);
  for (int i = 0; i < nu; ++i)
    if (dirichlet[i]) r[i] = g[i] - u[i];
  if (mesh.enclosed()) r[nu] = -p[0];
  return r;
}

DeterministicResult deterministic_navier_stokes(const Mesh& mesh, const NodalField& viscosity, const BoundaryFunction& bc,
                                                const NonlinearConfig& cfg, const ModePair* initial) {
  using clock = std::chrono::steady_clock;
  const auto t_start = clock::now();
  const int nu = mesh.n_u(), np = mesh.n_p();
  const SparseMatrix A = assemble_weighted_laplacian(mesh, viscosity);
  const SparseMatrix B = assemble_divergence(mesh);
  const std::vector<bool> mask = dirichlet_dof_mask(mesh);
  const auto gv = dirichlet_values(mesh, bc);
  const Vector g = Eigen::Map<const Vector>(gv.data(), static_cast<Eigen::Index>(gv.size()));
  SparseMatrix Bc = zero_columns(B, mask);
  SparseMatrix C(np, np);
  if (mesh.enclosed()) {
    std::vector<bool> pin(static_cast<std::size_t>(np), false);
    pin[0] = true;
    Bc = zero_rows(Bc, pin);
    C.insert(0, 0) = 1.0;
  }

  DeterministicResult res;
  res.report.ngdof = nu + np;
  res.report.linear_solver = SparseLU::backend();
  if (initial) {
    res.u = initial->u;
    res.p = initial->p;
    for (int i = 0; i < nu; ++i)
      if (mask[i]) res.u[i] = g[i];
  } else {
    res.u = g;
    res.p = Vector::Zero(np);
  }
  const double ynorm = g.norm() > 0 ? g.norm() : 1.0;
  auto residual = [&] { return deterministic_residual(mesh, A, B, g, mask, cfg.convection, res.u, res.p); };

  Vector r = residual();
  std::vector<double> hist{r.norm() / ynorm};
  res.report.initial_relative_residual = hist.back();

  auto step = [&](StepType type) {
    const auto t0 = clock::now();
    SparseMatrix F = A;
    if (cfg.convection && type != StepType::Stokes) {
      F += assemble_convection(mesh, res.u);
      if (type == StepType::Newton) F += assemble_newton_derivative(mesh, res.u);
    }
    const SparseMatrix K = assemble_saddle(constrain_symmetric(F, mask, 1.0), Bc, C);
    SparseLU lu(K);
    const Vector d = lu.solve(r);
    res.u += d.head(nu);
    res.p += d.tail(np);
    r = residual();
    hist.push_back(r.norm() / ynorm);
    res.report.steps.push_back({type, 1, hist.back(), std::chrono::duration<double>(clock::now() - t0).count()});
  };

  auto done = [&] { return hist.back() <= cfg.tol; };
  res.report.status = SolveStatus::MaxIt;
  try {
    if (!initial) step(StepType::Stokes);
    if (!cfg.convection) {
      res.report.status = done() ? SolveStatus::Converged : SolveStatus::MaxIt;
    } else {
      for (int i = 0; i < cfg.n_picard && !done(); ++i) {
        step(StepType::Picard);
        if (diverging(hist)) throw SolverError("diverged");
      }
      for (int i = 0; i < cfg.max_newton && !done(); ++i) {
        step(StepType::Newton);
        if (diverging(hist)) throw SolverError("diverged");
      }
      if (done()) res.report.status = SolveStatus::Converged;
    }
  } catch (const SolverError&) {
    res.report.status = SolveStatus::Diverged;
  }
  res.report.seconds = std::chrono::duration<double>(clock::now() - t_start).count();
  return res;
}

}  // namespace sgns
