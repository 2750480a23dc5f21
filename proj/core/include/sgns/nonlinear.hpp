#pragma once

#include <string>
#include <vector>

#include "sgns/galerkin.hpp"
#include "sgns/krylov.hpp"

namespace sgns {

struct LinearSolverSettings {
  /// Direct: sparse LU of the assembled system (deterministic solves, small stochastic problems).
  bool direct = false;
  PreconditionerSpec precond;
  FgmresConfig fgmres;  // tol 1e-8 for iterative solves inside nonlinear steps
};

struct NonlinearConfig {
  int n_picard = 6;
  int max_newton = 10;
  double tol = 1e-8;  // on ||R|| / ||y||
  bool inexact_picard = false;
  bool convection = true;
  LinearSolverSettings linear;
};

/// Picard step count used for a mean Reynolds number: 6 up to Re 100, 20 above.
int default_picard_steps(double re0);

enum class StepType { Stokes, Picard, Newton };
enum class SolveStatus { Converged, MaxIt, Diverged };
const char* to_string(StepType t);
const char* to_string(SolveStatus s);

struct StepRecord {
  StepType type = StepType::Stokes;
  int linear_iterations = 0;
  double relative_residual = 0.0;  // after the step
  double seconds = 0.0;
};

struct SolverReport {
  std::vector<StepRecord> steps;
  double initial_relative_residual = 1.0;
  SolveStatus status = SolveStatus::MaxIt;
  double seconds = 0.0;
  long long ngdof = 0;
  int M = 1;
  int M_nu = 1;
  std::string linear_solver;
  int restart = 0;

  int count(StepType t) const;
  double final_relative_residual() const;
  std::string to_json() const;
  /// step,type,linear_iterations,relative_residual (timings live in the JSON only, so reruns match byte for byte)
  std::string history_csv() const;
};

/// Divergence guard: a non-finite residual, or growth by more than 10x over three steps.
bool diverging(const std::vector<double>& history);

// ---------------------------------------------------------------------------------------------
// Deterministic Navier-Stokes (assembled saddle system, sparse LU per step).

struct DeterministicResult {
  Vector u;
  Vector p;
  SolverReport report;
};

/// Hybrid Stokes -> Picard -> Newton solve for one viscosity field. With an initial guess the
/// Stokes step is skipped. Failures are reported through report.status, not exceptions.
DeterministicResult deterministic_navier_stokes(const Mesh& mesh, const NodalField& viscosity, const BoundaryFunction& bc,
                                                const NonlinearConfig& cfg, const ModePair* initial = nullptr);

/// Nonlinear residual of the deterministic problem with the same row conventions as
/// global_residual (Dirichlet rows g - u_D, pinned pressure row -p_0).
Vector deterministic_residual(const Mesh& mesh, const SparseMatrix& A, const SparseMatrix& B, const Vector& g,
                              const std::vector<bool>& dirichlet, bool convection, const Vector& u, const Vector& p);

// ---------------------------------------------------------------------------------------------
// Stochastic Galerkin.

struct LinearSolveResult {
  Vector x;
  int iterations = 0;
  bool converged = true;
  double relative_residual = 0.0;
};

/// Solve op x = rhs with the configured linear solver. pcd is required only for PCD kinds.
LinearSolveResult solve_linear(const KronSumOperator& op, const Vector& rhs, const LinearSolverSettings& s,
                               const PcdOperators* pcd = nullptr);

/// Solution of the stochastic Stokes problem, as one correction from the lifted boundary data.
StochasticSolution solve_stochastic_stokes(const GalerkinProblem& problem, const LinearSolverSettings& s,
                                           SolverReport* report = nullptr);

struct HybridResult {
  StochasticSolution solution;
  SolverReport report;
};

/// Stokes, then n_picard Picard steps, then Newton until ||R|| <= tol ||y|| or max_newton.
/// Status diverged on the divergence guard, on a linear solver failure, or when an inexact
/// Picard step does not reduce the residual.
HybridResult hybrid_solve(const GalerkinProblem& problem, const NonlinearConfig& cfg);

/// One correction with only the mean blocks H_0 (x) calF_0 of the Picard operator. Returns the
/// updated iterate.
StochasticSolution inexact_picard_step(const GalerkinState& state);

/// PCD operators for the current mean iterate (wind = mode-0 velocity).
PcdOperators pcd_for_state(const GalerkinState& state);

}  // namespace sgns
