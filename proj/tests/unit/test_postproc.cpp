#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "fixtures.hpp"
#include "json.hpp"
#include "oracles.hpp"
#include "sgns/postproc.hpp"

using namespace sgns;

namespace {

// Surrogate of a single value: coefficient k of dof 0 is coeffs[k].
StochasticSolution scalar_surrogate(const std::vector<double>& coeffs) {
  BlockLayout l{static_cast<int>(coeffs.size()), 1, 0};
  StochasticSolution s(l);
  for (int k = 0; k < l.M; ++k) s.coeffs[k] = coeffs[k];
  return s;
}

const ProbeFunctional kFirstDof{{0}, {1.0}};

double mass_within(const PdfCurve& c, double center, double radius) {
  double m = 0.0;
  for (std::size_t i = 1; i < c.x.size(); ++i) {
    const double xm = 0.5 * (c.x[i] + c.x[i - 1]);
    if (std::abs(xm - center) <= radius) m += 0.5 * (c.density[i] + c.density[i - 1]) * (c.x[i] - c.x[i - 1]);
  }
  return m;
}

}  // namespace

TEST(Moments, SingleModeHasZeroVariance) {
  BlockLayout l{1, 4, 2};
  const StochasticSolution s(l, fixture::random_vector(6, 1));
  const Moments m = moments(s);
  EXPECT_EQ(m.mean, s.coeffs);
  EXPECT_EQ(m.variance.norm(), 0.0);
}

TEST(Moments, VarianceIsSumOfSquares) {
  BlockLayout l{3, 4, 2};
  const Vector a = fixture::random_vector(6, 2), b = fixture::random_vector(6, 3);
  Vector c(18);
  c << Vector::Zero(6), a, b;
  const Moments m = moments(StochasticSolution(l, c));
  EXPECT_EQ(m.mean.norm(), 0.0);
  EXPECT_LE((m.variance - (a.array().square() + b.array().square()).matrix()).norm(), 1e-15);
}

TEST(Summary, QuantilesAndStats) {
  const std::vector<double> v{4.0, 1.0, 3.0, 2.0, 5.0};
  EXPECT_DOUBLE_EQ(quantile(v, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(quantile(v, 0.5), 3.0);
  EXPECT_DOUBLE_EQ(quantile(v, 1.0), 5.0);
  EXPECT_DOUBLE_EQ(quantile(v, 0.125), 1.5);
  const auto s = summarize(v);
  EXPECT_EQ(s.n, 5);
  EXPECT_DOUBLE_EQ(s.mean, 3.0);
  EXPECT_DOUBLE_EQ(s.variance, 2.5);
  EXPECT_DOUBLE_EQ(s.std_error, std::sqrt(0.5));
}

TEST(Kde, LinearSurrogateMatchesNormalDensity) {
  const auto basis = total_degree_indices(2, 1);
  const auto sol = scalar_surrogate({1.0, 0.3, 0.4});
  const auto samples = surrogate_samples(sol, basis, kFirstDof, 100000, 7);
  const PdfCurve c = kde(samples);
  EXPECT_NEAR(c.integral(), 1.0, 1e-3);
  EXPECT_GE(*std::min_element(c.density.begin(), c.density.end()), 0.0);
  double l1 = 0.0;
  for (std::size_t i = 1; i < c.x.size(); ++i) {
    auto err = [&](std::size_t j) { return std::abs(c.density[j] - oracle::normal_pdf(c.x[j], 1.0, 0.5)); };
    l1 += 0.5 * (err(i) + err(i - 1)) * (c.x[i] - c.x[i - 1]);
  }
  EXPECT_LE(l1, 0.02);
  // Silverman bandwidth from the sample spread.
  EXPECT_NEAR(c.bandwidth, 0.9 * 0.5 * std::pow(1e5, -0.2), 0.02 * c.bandwidth);
}

TEST(Kde, DeterministicLimitIsSpike) {
  const auto basis = total_degree_indices(2, 2);
  const auto sol = scalar_surrogate({0.7, 0, 0, 0, 0, 0});
  const PdfCurve c = kde(surrogate_samples(sol, basis, kFirstDof, 1000, 3));
  EXPECT_GE(mass_within(c, 0.7, 1e-6), 0.99);
  EXPECT_NEAR(c.integral(), 1.0, 1e-3);
}

TEST(Kde, WiderSurrogateHasWiderSupport) {
  const auto basis = total_degree_indices(2, 1);
  const auto narrow = surrogate_samples(scalar_surrogate({1.0, 0.1, 0.0}), basis, kFirstDof, 20000, 1);
  const auto wide = surrogate_samples(scalar_surrogate({1.0, 0.3, 0.0}), basis, kFirstDof, 20000, 1);
  EXPECT_GT(quantile(wide, 0.95) - quantile(wide, 0.05), quantile(narrow, 0.95) - quantile(narrow, 0.05));
  EXPECT_THROW(kde({1.0}), std::invalid_argument);
}

TEST(Kde, CsvAndDistance) {
  const PdfCurve a = kde({0.0, 1.0, 2.0, 1.5}, 64);
  EXPECT_EQ(l1_distance(a, a), 0.0);
  const std::string csv = a.to_csv();
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 65);
  PdfCurve shifted = a;
  for (auto& x : shifted.x) x += 100.0;
  EXPECT_NEAR(l1_distance(a, shifted), 2.0, 1e-3);
}

TEST(Probes, InterpolatesFiniteElementField) {
  auto f = fixture::make_problem(fixture::cavity_config(4, 0.0, 1, 1));
  const Mesh& mesh = *f->setup.mesh;
  Vector block = Vector::Zero(mesh.n_u() + mesh.n_p());
  const int nv = mesh.num_velocity_nodes();
  for (int n = 0; n < nv; ++n) {
    const Point q = mesh.nodes[n];
    block[n] = q.x * q.x + 2.0 * q.y;  // reproduced by Q2
    block[nv + n] = q.x * q.y;
  }
  const Point at{0.31, -0.57};
  EXPECT_NEAR(probe_functional(mesh, {at, ProbeField::Ux})(block.data()), at.x * at.x + 2.0 * at.y, 1e-13);
  EXPECT_NEAR(probe_functional(mesh, {at, ProbeField::Uy})(block.data()), at.x * at.y, 1e-13);
  EXPECT_THROW(probe_functional(mesh, {{1.5, 0.0}, ProbeField::Ux}), std::invalid_argument);
  EXPECT_EQ(probe_field_from_string("p"), ProbeField::P);
  EXPECT_THROW(probe_field_from_string("T"), std::invalid_argument);
}

TEST(Probes, ObstacleInteriorIsOutside) {
  auto f = fixture::make_problem(fixture::channel_config(48, 8, 0.0, 1, 1));
  EXPECT_THROW(probe_functional(*f->setup.mesh, {{2.0, 0.0}, ProbeField::Ux}), std::invalid_argument);
  EXPECT_NO_THROW(probe_functional(*f->setup.mesh, {{4.01, -0.4339}, ProbeField::Ux}));
}

TEST(IntegrateVelocity, ConstantField) {
  auto f = fixture::make_problem(fixture::cavity_config(4, 0.0, 1, 1));
  const Mesh& mesh = *f->setup.mesh;
  Vector block = Vector::Zero(mesh.n_u() + mesh.n_p());
  block.head(mesh.n_u()).setOnes();
  EXPECT_NEAR(integrate_velocity(mesh, block), 8.0, 1e-12);
}

TEST(CompareMethods, SelfAndMismatch) {
  MethodOutput a;
  a.name = "galerkin";
  a.moments = {fixture::random_vector(8, 1), fixture::random_vector(8, 2).cwiseAbs()};
  a.probes = {{{0.1, 0.2}, ProbeField::Ux}};
  a.pdfs = {kde({0.0, 1.0, 0.5}, 32)};
  a.probe_stats = {summarize({0.0, 1.0, 0.5})};
  const auto c = compare_methods(a, a, 6);
  EXPECT_EQ(c.mean_velocity_rel_diff, 0.0);
  EXPECT_EQ(c.variance_velocity_rel_diff, 0.0);
  EXPECT_EQ(c.pdf_l1, std::vector<double>{0.0});
  EXPECT_EQ(c.probe_mean_diff_in_std_errors, std::vector<double>{0.0});
  const auto j = nlohmann::json::parse(c.to_json());
  EXPECT_EQ(j["a"], "galerkin");

  MethodOutput b = a;
  b.moments.mean = Vector::Zero(9);
  EXPECT_THROW(compare_methods(a, b, 6), std::invalid_argument);
  b = a;
  b.probes[0].field = ProbeField::P;
  EXPECT_THROW(compare_methods(a, b, 6), std::invalid_argument);
}
