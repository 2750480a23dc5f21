#pragma once

#include <memory>
#include <random>

#include "sgns/config.hpp"
#include "sgns/galerkin.hpp"

namespace fixture {

inline sgns::ExperimentConfig cavity_config(int n, double cov, int N, int P, double re0 = 100.0) {
  sgns::ExperimentConfig c;
  c.geometry = sgns::Geometry::Cavity;
  c.nx = n;
  c.ny = n;
  c.obstacle.reset();
  c.cov = cov;
  c.N = N;
  c.P = P;
  c.re0 = re0;
  c.correlation = {0.0, 1.0, 0.5};
  return c;
}

inline sgns::ExperimentConfig channel_config(int nx, int ny, double cov, int N, int P) {
  sgns::ExperimentConfig c;
  c.nx = nx;
  c.ny = ny;
  c.obstacle = sgns::default_obstacle();
  c.cov = cov;
  c.N = N;
  c.P = P;
  return c;
}

struct Problem {
  sgns::ExperimentSetup setup;
  sgns::GalerkinProblem problem;
};

inline std::unique_ptr<Problem> make_problem(const sgns::ExperimentConfig& c) {
  auto p = std::make_unique<Problem>();
  p->setup = sgns::setup_experiment(c);
  p->problem = sgns::make_galerkin_problem(p->setup.mesh, p->setup.viscosity, c.P, p->setup.bc);
  return p;
}

inline sgns::Vector random_vector(Eigen::Index n, unsigned seed, double scale = 1.0) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> u(-scale, scale);
  sgns::Vector v(n);
  for (auto& x : v) x = u(gen);
  return v;
}

/// Random iterate that satisfies the boundary data: lifted data plus a perturbation that vanishes
/// on Dirichlet dofs (and on a pinned pressure dof).
inline sgns::StochasticSolution random_iterate(const sgns::GalerkinProblem& pr, unsigned seed, double scale = 0.3) {
  sgns::StochasticSolution v = pr.lifted_zero();
  const auto& L = pr.layout;
  sgns::Vector d = random_vector(L.ngdof(), seed, scale);
  for (int k = 0; k < L.M; ++k) {
    for (int i = 0; i < L.n_u; ++i)
      if (pr.dirichlet[i]) d[L.offset(k) + i] = 0.0;
    if (pr.pin_pressure) d[L.offset(k) + L.n_u] = 0.0;
  }
  v.coeffs += d;
  return v;
}

}  // namespace fixture
