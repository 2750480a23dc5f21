#include <gtest/gtest.h>

#include <numeric>

#include "fixtures.hpp"
#include "sgns/sampling.hpp"

using namespace sgns;

namespace {

NonlinearConfig direct_config() {
  NonlinearConfig c;
  c.linear.direct = true;
  return c;
}

SamplingConfig sampling_config() {
  SamplingConfig s;
  s.nonlinear = direct_config();
  return s;
}

}  // namespace

TEST(MonteCarloPoints, ReproducibleFromSeedAndIndex) {
  const auto a = mc_point(7, 5, 3);
  ASSERT_EQ(a.size(), 3u);
  for (std::uint64_t q = 0; q < 5; ++q) mc_point(7, q, 3);
  EXPECT_EQ(mc_point(7, 5, 3), a);
  EXPECT_NE(mc_point(7, 6, 3), a);
  EXPECT_NE(mc_point(8, 5, 3), a);
  // Standard-normal marginals.
  double s = 0.0, s2 = 0.0;
  const int n = 20000;
  for (int q = 0; q < n; ++q) {
    const double x = mc_point(1, q, 1)[0];
    s += x;
    s2 += x * x;
  }
  EXPECT_NEAR(s / n, 0.0, 4.0 / std::sqrt(n));
  EXPECT_NEAR(s2 / n, 1.0, 0.05);
}

TEST(DeterministicSolve, MatchesGalerkinMeanAtZeroVariance) {
  auto f = fixture::make_problem(fixture::cavity_config(8, 0.0, 2, 2));
  const auto& s = f->setup;
  const auto g = hybrid_solve(f->problem, direct_config());
  ASSERT_EQ(g.report.status, SolveStatus::Converged);
  const auto d = deterministic_solve(s.viscosity.coeffs[0], *s.mesh, s.bc, direct_config());
  ASSERT_TRUE(d.converged);
  const ModePair m0 = mode_extract(g.solution, 0);
  EXPECT_LE((d.solution.u - m0.u).norm(), 1e-8 * m0.u.norm());
  EXPECT_LE(d.report.steps.size(), 15u);
}

TEST(DeterministicSolve, StokesLimitMatchesStochasticStokes) {
  auto f = fixture::make_problem(fixture::cavity_config(8, 0.0, 2, 2));
  const auto& s = f->setup;
  LinearSolverSettings ls;
  ls.direct = true;
  const ModePair m0 = mode_extract(solve_stochastic_stokes(f->problem, ls), 0);
  NonlinearConfig c = direct_config();
  c.convection = false;
  const auto d = deterministic_solve(s.viscosity.coeffs[0], *s.mesh, s.bc, c);
  ASSERT_TRUE(d.converged);
  EXPECT_LE((d.solution.u - m0.u).norm(), 1e-8 * m0.u.norm());
}

TEST(MonteCarlo, ZeroVarianceAndWeights) {
  auto f = fixture::make_problem(fixture::cavity_config(6, 0.0, 2, 1));
  const auto& s = f->setup;
  const auto r = monte_carlo(s.viscosity, *s.mesh, s.bc, 4, 3, sampling_config());
  EXPECT_EQ(r.ensemble.size(), 4);
  EXPECT_EQ(std::accumulate(r.ensemble.weights.begin(), r.ensemble.weights.end(), 0.0), 1.0);
  EXPECT_LE(r.moments.variance.cwiseAbs().maxCoeff(), 1e-24);
  EXPECT_EQ(r.ensemble.failures, 0);
}

TEST(MonteCarlo, SeededRerunIsBitwiseIdentical) {
  auto f = fixture::make_problem(fixture::cavity_config(6, 0.2, 2, 1));
  const auto& s = f->setup;
  const auto a = monte_carlo(s.viscosity, *s.mesh, s.bc, 5, 11, sampling_config());
  const auto b = monte_carlo(s.viscosity, *s.mesh, s.bc, 5, 11, sampling_config());
  EXPECT_EQ(a.moments.mean, b.moments.mean);
  EXPECT_EQ(a.moments.variance, b.moments.variance);
  EXPECT_EQ(a.ensemble.points, b.ensemble.points);
  const auto c = monte_carlo(s.viscosity, *s.mesh, s.bc, 5, 12, sampling_config());
  EXPECT_NE(a.moments.mean, c.moments.mean);
}

TEST(MonteCarlo, RejectsTooFewSamples) {
  auto f = fixture::make_problem(fixture::cavity_config(4, 0.1, 1, 1));
  const auto& s = f->setup;
  EXPECT_THROW(monte_carlo(s.viscosity, *s.mesh, s.bc, 1, 1, sampling_config()), std::invalid_argument);
}

TEST(MonteCarlo, ProbeMeanAgreesWithGalerkin) {
  auto f = fixture::make_problem(fixture::cavity_config(6, 0.1, 2, 2));
  const auto& s = f->setup;
  const auto g = hybrid_solve(f->problem, direct_config());
  ASSERT_EQ(g.report.status, SolveStatus::Converged);
  const auto probe = probe_functional(*s.mesh, {{0.3, 0.4}, ProbeField::Ux});
  SamplingConfig cfg = sampling_config();
  cfg.warm_start = &g.solution;
  const auto r = monte_carlo(s.viscosity, *s.mesh, s.bc, 500, 5, cfg, {probe});
  const auto stats = summarize(r.ensemble.probe_values[0]);
  const double galerkin = probe(g.solution.coeffs.data());
  EXPECT_LE(std::abs(stats.mean - galerkin), 3.0 * stats.std_error);
}

TEST(Collocation, ConstantSolutionLivesInMeanCoefficient) {
  auto f = fixture::make_problem(fixture::cavity_config(6, 0.0, 2, 2));
  const auto& s = f->setup;
  const auto rule = smolyak_rule(3, 2);
  const auto r = collocation(s.viscosity, *s.mesh, s.bc, rule, f->problem.basis, sampling_config());
  const auto& v = r.solution;
  const double n0 = v.coeffs.segment(0, v.layout.block()).norm();
  for (int k = 1; k < v.layout.M; ++k) EXPECT_LE(v.coeffs.segment(v.layout.offset(k), v.layout.block()).norm(), 1e-12 * n0);
  double w = 0.0;
  for (double x : r.ensemble.weights) w += x;
  EXPECT_NEAR(w, 1.0, 1e-12);
}

TEST(Collocation, ProjectionRecoversPolynomialSurrogate) {
  const auto basis = total_degree_indices(2, 3);
  BlockLayout layout{basis.size(), 5, 2};
  const StochasticSolution exact(layout, fixture::random_vector(layout.ngdof(), 9));
  const auto rule = smolyak_rule(4, 2);
  StochasticSolution projected(layout);
  for (int q = 0; q < rule.size(); ++q) {
    const ModePair at = evaluate_surrogate(exact, basis, rule.points[q]);
    const Vector psi = evaluate_basis(basis, rule.points[q]);
    for (int k = 0; k < layout.M; ++k) {
      projected.coeffs.segment(layout.offset(k), layout.n_u) += rule.weights[q] * psi[k] * at.u;
      projected.coeffs.segment(layout.offset(k) + layout.n_u, layout.n_p) += rule.weights[q] * psi[k] * at.p;
    }
  }
  EXPECT_LE((projected.coeffs - exact.coeffs).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Collocation, MatchesGalerkinOnSmallCavity) {
  auto f = fixture::make_problem(fixture::cavity_config(6, 0.1, 2, 2));
  const auto& s = f->setup;
  const auto g = hybrid_solve(f->problem, direct_config());
  SamplingConfig cfg = sampling_config();
  cfg.warm_start = &g.solution;
  const auto a = collocation(s.viscosity, *s.mesh, s.bc, smolyak_rule(4, 2), f->problem.basis, cfg);
  const auto b = collocation(s.viscosity, *s.mesh, s.bc, smolyak_rule(4, 2), f->problem.basis, cfg);
  EXPECT_EQ(a.solution.coeffs, b.solution.coeffs);
  const Moments mg = moments(g.solution), mc = moments(a.solution);
  const int nu = f->problem.layout.n_u;
  EXPECT_LE((mg.mean.head(nu) - mc.mean.head(nu)).norm(), 1e-3 * mg.mean.head(nu).norm());
  EXPECT_LE((mg.variance.head(nu) - mc.variance.head(nu)).norm(), 1e-2 * mg.variance.head(nu).norm());
}
