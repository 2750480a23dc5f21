#include <chrono>
#include <cmath>
#include <sstream>

#include "json.hpp"

#include "sgns/direct_solver.hpp"
#include "sgns/nonlinear.hpp"

namespace sgns {

int default_picard_steps(double re0) { return re0 > 100.0 + 1e-9 ? 20 : 6; }

const char* to_string(StepType t) {
  switch (t) {
    case StepType::Stokes: return "stokes";
    case StepType::Picard: return "picard";
    case StepType::Newton: return "newton";
  }
  return "?";
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::MaxIt: return "maxit";
    case SolveStatus::Diverged: return "diverged";
  }
  return "?";
}

int SolverReport::count(StepType t) const {
  int n = 0;
  for (const auto& s : steps) n += s.type == t;
  return n;
}

double SolverReport::final_relative_residual() const {
  return steps.empty() ? initial_relative_residual : steps.back().relative_residual;
}

std::string SolverReport::to_json() const {
  nlohmann::ordered_json j;
  j["status"] = to_string(status);
  j["seconds"] = seconds;
  j["ngdof"] = ngdof;
  j["M"] = M;
  j["M_nu"] = M_nu;
  j["linear_solver"] = linear_solver;
  j["restart"] = restart;
  j["initial_relative_residual"] = initial_relative_residual;
  j["final_relative_residual"] = final_relative_residual();
  j["stokes_steps"] = count(StepType::Stokes);
  j["picard_steps"] = count(StepType::Picard);
  j["newton_steps"] = count(StepType::Newton);
  auto& arr = j["steps"] = nlohmann::ordered_json::array();
  for (const auto& s : steps)
    arr.push_back({{"type", to_string(s.type)},
                   {"linear_iterations", s.linear_iterations},
                   {"relative_residual", s.relative_residual},
                   {"seconds", s.seconds}});
  return j.dump(2);
}

std::string SolverReport::history_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "step,type,linear_iterations,relative_residual\n";
  os << 0 << ",initial,0," << initial_relative_residual << '\n';
  for (std::size_t i = 0; i < steps.size(); ++i)
    os << i + 1 << ',' << to_string(steps[i].type) << ',' << steps[i].linear_iterations << ','
       << steps[i].relative_residual << '\n';
  return os.str();
}

bool diverging(const std::vector<double>& h) {
  if (!h.empty() && !std::isfinite(h.back())) return true;
  return h.size() >= 4 && h.back() > 10.0 * h[h.size() - 4];
}

LinearSolveResult solve_linear(const KronSumOperator& op, const Vector& rhs, const LinearSolverSettings& s,
                               const PcdOperators* pcd) {
  LinearSolveResult out;
  if (s.direct) {
    SparseLU lu(assemble_global(op));
    out.x = lu.solve(rhs);
    out.iterations = 1;
    const double bn = rhs.norm();
    out.relative_residual = bn > 0 ? (rhs - kron_matvec(op, out.x)).norm() / bn : 0.0;
    return out;
  }
  const auto pre = make_preconditioner(op, s.precond, pcd);
  const auto res = fgmres(operator_map(op), pre->as_map(), rhs, s.fgmres);
  out.x = res.x;
  out.iterations = res.iterations;
  out.converged = res.converged;
  out.relative_residual = res.true_relative_residual;
  return out;
}

PcdOperators pcd_for_state(const GalerkinState& state) {
  const auto& pr = state.problem();
  const Vector wind = pr.convection ? Vector(state.iterate().coeffs.head(pr.layout.n_u)) : Vector::Zero(pr.layout.n_u);
  return assemble_pcd_operators(*pr.mesh, pr.mean_viscosity, wind);
}

namespace {

bool needs_pcd(const LinearSolverSettings& s) {
  return !s.direct && (s.precond.kind == PrecondKind::AHGS_PCD || s.precond.kind == PrecondKind::AHGS_PCD_IT);
}

}  // namespace

StochasticSolution inexact_picard_step(const GalerkinState& state) {
  const auto& pr = state.problem();
  const KronSumOperator op = build_linearized_operator(state, Linearization::Picard);
  const Vector r = global_residual(state);
  const auto solver = make_direct_mean_solver(op);
  StochasticSolution v = state.iterate();
  Vector d(pr.layout.block());
  for (int k = 0; k < pr.layout.M; ++k) {
    solver->solve(k, r.data() + pr.layout.offset(k), d.data());
    v.coeffs.segment(pr.layout.offset(k), pr.layout.block()) += d;
  }
  return v;
}

StochasticSolution solve_stochastic_stokes(const GalerkinProblem& problem, const LinearSolverSettings& s,
                                           SolverReport* report) {
  GalerkinState state(problem);
  state.rebuild();
  const Vector r = global_residual(state, false);
  const KronSumOperator op = build_stokes_operator(problem);
  std::unique_ptr<PcdOperators> pcd;
  if (needs_pcd(s)) pcd = std::make_unique<PcdOperators>(pcd_for_state(state));
  const auto t0 = std::chrono::steady_clock::now();
  const LinearSolveResult ls = solve_linear(op, r, s, pcd.get());
  if (!ls.converged) throw SolverError("stochastic Stokes: linear solver did not converge");
  StochasticSolution v = state.iterate();
  v.coeffs += ls.x;
  if (report) {
    state.set_iterate(v);
    state.rebuild();
    const double yn = problem.rhs().norm();
    report->steps.push_back({StepType::Stokes, ls.iterations, global_residual(state).norm() / yn,
                             std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()});
  }
  return v;
}

HybridResult hybrid_solve(const GalerkinProblem& problem, const NonlinearConfig& cfg) {
  using clock = std::chrono::steady_clock;
  const auto t_start = clock::now();
  if (!(cfg.tol > 0.0) || cfg.n_picard < 0 || cfg.max_newton < 0) throw std::invalid_argument("hybrid_solve: invalid config");

  HybridResult out;
  SolverReport& rep = out.report;
  rep.ngdof = problem.layout.ngdof();
  rep.M = problem.M();
  rep.M_nu = problem.M_nu();
  rep.restart = cfg.linear.fgmres.restart;
  rep.linear_solver = cfg.linear.direct ? std::string("direct-") + SparseLU::backend()
                                        : std::string("fgmres+") + to_string(cfg.linear.precond.kind);

  GalerkinState state(problem);
  state.rebuild();
  const double yn = problem.rhs().norm() > 0 ? problem.rhs().norm() : 1.0;
  Vector r = global_residual(state);
  std::vector<double> hist{r.norm() / yn};
  rep.initial_relative_residual = hist.back();

  auto step = [&](StepType type) {
    const auto t0 = clock::now();
    int iters = 0;
    if (type == StepType::Picard && cfg.inexact_picard) {
      state.set_iterate(inexact_picard_step(state));
      iters = 1;
    } else {
      const Linearization lin = type == StepType::Stokes   ? Linearization::Stokes
                                : type == StepType::Picard ? Linearization::Picard
                                                           : Linearization::Newton;
      const KronSumOperator op = build_linearized_operator(state, lin);
      std::unique_ptr<PcdOperators> pcd;
      if (needs_pcd(cfg.linear)) pcd = std::make_unique<PcdOperators>(pcd_for_state(state));
      const LinearSolveResult ls = solve_linear(op, r, cfg.linear, pcd.get());
      if (!ls.converged) throw SolverError("linear solver did not converge");
      iters = ls.iterations;
      StochasticSolution v = state.iterate();
      v.coeffs += ls.x;
      state.set_iterate(std::move(v));
    }
    state.rebuild();
    r = global_residual(state);
    hist.push_back(r.norm() / yn);
    rep.steps.push_back({type, iters, hist.back(), std::chrono::duration<double>(clock::now() - t0).count()});
  };

  auto done = [&] { return hist.back() <= cfg.tol; };
  rep.status = SolveStatus::MaxIt;
  try {
    step(StepType::Stokes);
    if (!problem.convection) {
      if (done()) rep.status = SolveStatus::Converged;
    } else {
      for (int i = 0; i < cfg.n_picard && !done(); ++i) {
        step(StepType::Picard);
        if (diverging(hist)) throw SolverError("diverged");
        // The mean-block correction is a stationary iteration: once a step fails to reduce the
        // residual its amplification factor exceeds one and the iteration cannot recover.
        if (cfg.inexact_picard && hist.back() >= hist[hist.size() - 2]) throw SolverError("inexact Picard diverged");
      }
      for (int i = 0; i < cfg.max_newton && !done(); ++i) {
        step(StepType::Newton);
        if (diverging(hist)) throw SolverError("diverged");
      }
      if (done()) rep.status = SolveStatus::Converged;
    }
  } catch (const SolverError&) {
    rep.status = SolveStatus::Diverged;
  }
  out.solution = state.iterate();
  rep.seconds = std::chrono::duration<double>(clock::now() - t_start).count();
  return out;
}

}  // namespace sgns
