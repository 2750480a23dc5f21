#include "sgns/sampling.hpp"

#include <random>
#include <stdexcept>
#include <string>

namespace sgns {

SampleSolve deterministic_solve(const NodalField& viscosity, const Mesh& mesh, const BoundaryFunction& bc,
                                const NonlinearConfig& cfg, const ModePair* initial) {
  if ((viscosity.array() <= 0.0).any()) throw std::invalid_argument("deterministic_solve: viscosity must be positive");
  SampleSolve s;
  if (initial) {
    NonlinearConfig warm = cfg;
    warm.n_picard = 0;
    auto r = deterministic_navier_stokes(mesh, viscosity, bc, warm, initial);
    if (r.report.status == SolveStatus::Converged) {
      s.solution = {std::move(r.u), std::move(r.p)};
      s.report = std::move(r.report);
      s.converged = true;
      return s;
    }
  }
  auto r = deterministic_navier_stokes(mesh, viscosity, bc, cfg);
  s.converged = r.report.status == SolveStatus::Converged;
  s.solution = {std::move(r.u), std::move(r.p)};
  s.report = std::move(r.report);
  return s;
}

ModePair evaluate_surrogate(const StochasticSolution& sol, const MultiIndexSet& basis, const std::vector<double>& xi) {
  const Vector psi = evaluate_basis(basis, xi);
  const auto& l = sol.layout;
  if (psi.size() != l.M) throw std::invalid_argument("evaluate_surrogate: basis size does not match the solution");
  Vector block = Vector::Zero(l.block());
  for (int k = 0; k < l.M; ++k) block += psi[k] * sol.coeffs.segment(l.offset(k), l.block());
  return {block.head(l.n_u), block.tail(l.n_p)};
}

std::vector<double> mc_point(std::uint64_t seed, std::uint64_t q, int N) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(q), static_cast<std::uint32_t>(q >> 32)};
  std::mt19937_64 gen(seq);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> xi(static_cast<std::size_t>(N));
  for (auto& x : xi) x = normal(gen);
  return xi;
}

namespace {

MultiIndexSet basis_of_size(int N, int M) {
  for (int P = 0; P < 64; ++P) {
    const long long m = binomial(N + P, P);
    if (m == M) return total_degree_indices(N, P);
    if (m > M) break;
  }
  throw std::invalid_argument("warm start surrogate size " + std::to_string(M) + " is not a total-degree basis size");
}

struct Sampler {
  const StochasticViscosity& visc;
  const Mesh& mesh;
  const BoundaryFunction& bc;
  const SamplingConfig& cfg;
  const std::vector<ProbeFunctional>& probes;
  std::optional<MultiIndexSet> warm_basis;
  SampleEnsemble ens;

  Sampler(const StochasticViscosity& v, const Mesh& m, const BoundaryFunction& b, const SamplingConfig& c,
          const std::vector<ProbeFunctional>& p)
      : visc(v), mesh(m), bc(b), cfg(c), probes(p) {
    if (cfg.warm_start) warm_basis = basis_of_size(visc.basis.N, cfg.warm_start->layout.M);
    ens.probe_values.resize(probes.size());
  }

  /// Solves at xi and records the sample; returns nullopt for a failed sample.
  std::optional<ModePair> run(const std::vector<double>& xi, double weight) {
    int negative = 0;
    const NodalField nu = sample_viscosity(visc, xi, &negative);
    ens.points.push_back(xi);
    ens.weights.push_back(weight);
    if (negative > 0) {
      ++ens.negative_viscosity_samples;
      ens.converged.push_back(false);
      ens.nonlinear_steps.push_back(0);
      ++ens.failures;
      return std::nullopt;
    }
    std::optional<ModePair> guess;
    if (cfg.warm_start) guess = evaluate_surrogate(*cfg.warm_start, *warm_basis, xi);
    SampleSolve s = deterministic_solve(nu, mesh, bc, cfg.nonlinear, guess ? &*guess : nullptr);
    ens.converged.push_back(s.converged);
    ens.nonlinear_steps.push_back(static_cast<int>(s.report.steps.size()));
    if (!s.converged) {
      ++ens.failures;
      return std::nullopt;
    }
    Vector block(s.solution.u.size() + s.solution.p.size());
    block << s.solution.u, s.solution.p;
    for (std::size_t i = 0; i < probes.size(); ++i) ens.probe_values[i].push_back(probes[i](block.data()));
    return std::move(s.solution);
  }

  void check_failures(int total) const {
    if (ens.failures > cfg.max_failure_fraction * total)
      throw SolverError("sampling: " + std::to_string(ens.failures) + " of " + std::to_string(total) +
                        " samples failed (limit " + std::to_string(cfg.max_failure_fraction * 100.0) + "%)");
  }
};

}  // namespace

MonteCarloResult monte_carlo(const StochasticViscosity& visc, const Mesh& mesh, const BoundaryFunction& bc, int n,
                             std::uint64_t seed, const SamplingConfig& cfg, const std::vector<ProbeFunctional>& probes) {
  if (n < 2) throw std::invalid_argument("monte_carlo: need at least 2 samples");
  Sampler sampler(visc, mesh, bc, cfg, probes);
  const int bs = mesh.n_u() + mesh.n_p();
  // Welford accumulation in sample order.
  Vector mean = Vector::Zero(bs), m2 = Vector::Zero(bs);
  int kept = 0;
  for (int q = 0; q < n; ++q) {
    const auto sol = sampler.run(mc_point(seed, static_cast<std::uint64_t>(q), visc.basis.N), 1.0 / n);
    if (!sol) continue;
    Vector x(bs);
    x << sol->u, sol->p;
    ++kept;
    const Vector delta = x - mean;
    mean += delta / kept;
    m2 += delta.cwiseProduct(x - mean);
  }
  sampler.check_failures(n);
  MonteCarloResult res;
  res.ensemble = std::move(sampler.ens);
  res.moments.mean = mean;
  res.moments.variance = kept > 1 ? Vector(m2 / (kept - 1)) : Vector::Zero(bs);
  return res;
}

CollocationResult collocation(const StochasticViscosity& visc, const Mesh& mesh, const BoundaryFunction& bc,
                              const QuadratureRule& rule, const MultiIndexSet& basis, const SamplingConfig& cfg,
                              const std::vector<ProbeFunctional>& probes) {
  if (rule.N != visc.basis.N || basis.N != visc.basis.N)
    throw std::invalid_argument("collocation: rule, basis and viscosity dimensions differ");
  Sampler sampler(visc, mesh, bc, cfg, probes);
  const BlockLayout layout{basis.size(), mesh.n_u(), mesh.n_p()};
  CollocationResult res;
  res.solution = StochasticSolution(layout);
  Vector x(layout.block());
  for (int q = 0; q < rule.size(); ++q) {
    const auto sol = sampler.run(rule.points[q], rule.weights[q]);
    if (!sol) continue;
    x << sol->u, sol->p;
    const Vector psi = evaluate_basis(basis, rule.points[q]);
    for (int k = 0; k < layout.M; ++k)
      res.solution.coeffs.segment(layout.offset(k), layout.block()) += (rule.weights[q] * psi[k]) * x;
  }
  sampler.check_failures(rule.size());
  res.ensemble = std::move(sampler.ens);
  return res;
}

}  // namespace sgns
