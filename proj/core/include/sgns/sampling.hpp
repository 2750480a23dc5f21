#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "sgns/nonlinear.hpp"
#include "sgns/postproc.hpp"
#include "sgns/random_field.hpp"

namespace sgns {

struct SamplingConfig {
  NonlinearConfig nonlinear;
  /// Start each sample from this gPC surrogate evaluated at the sample point (Newton only);
  /// a failed warm start falls back to the full hybrid solve.
  const StochasticSolution* warm_start = nullptr;
  /// Abort when more than this fraction of samples fails.
  double max_failure_fraction = 0.05;
};

struct SampleSolve {
  ModePair solution;
  SolverReport report;
  bool converged = false;
};

/// One deterministic Navier-Stokes solve for a viscosity realization.
SampleSolve deterministic_solve(const NodalField& viscosity, const Mesh& mesh, const BoundaryFunction& bc,
                                const NonlinearConfig& cfg, const ModePair* initial = nullptr);

struct SampleEnsemble {
  std::vector<std::vector<double>> points;
  std::vector<double> weights;
  std::vector<bool> converged;
  std::vector<int> nonlinear_steps;
  /// probe_values[p][q] for each requested probe functional and retained sample q.
  std::vector<std::vector<double>> probe_values;
  int failures = 0;
  int negative_viscosity_samples = 0;

  int size() const { return static_cast<int>(points.size()); }
};

struct MonteCarloResult {
  SampleEnsemble ensemble;
  Moments moments;  // ensemble mean and (unbiased) variance of every (u, p) dof
};

/// Standard-normal point for sample q; reproducible from (seed, q) alone.
std::vector<double> mc_point(std::uint64_t seed, std::uint64_t q, int N);

/// Throws std::invalid_argument if n < 2 and SolverError if too many samples fail.
MonteCarloResult monte_carlo(const StochasticViscosity& visc, const Mesh& mesh, const BoundaryFunction& bc, int n,
                             std::uint64_t seed, const SamplingConfig& cfg,
                             const std::vector<ProbeFunctional>& probes = {});

struct CollocationResult {
  StochasticSolution solution;
  SampleEnsemble ensemble;
};

/// Pseudospectral projection u_k = sum_q w_q u(xi_q) psi_k(xi_q) onto the degree-P basis.
CollocationResult collocation(const StochasticViscosity& visc, const Mesh& mesh, const BoundaryFunction& bc,
                              const QuadratureRule& rule, const MultiIndexSet& basis, const SamplingConfig& cfg,
                              const std::vector<ProbeFunctional>& probes = {});

/// Evaluate sum_k v_k psi_k(xi) as a deterministic (u, p) pair.
ModePair evaluate_surrogate(const StochasticSolution& sol, const MultiIndexSet& basis, const std::vector<double>& xi);

}  // namespace sgns
