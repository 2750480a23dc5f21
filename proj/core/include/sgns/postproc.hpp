#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sgns/galerkin.hpp"

namespace sgns {

enum class ProbeField { Ux, Uy, P };
const char* to_string(ProbeField f);
ProbeField probe_field_from_string(const std::string& s);

struct ProbeSpec {
  Point point;
  ProbeField field = ProbeField::Ux;
  int samples = 100000;  // surrogate draws for the pdf estimate
};

/// Point evaluation of the FE interpolant as a linear functional on one (u, p) block.
struct ProbeFunctional {
  std::vector<int> index;
  std::vector<double> weight;

  double operator()(const double* block) const;
};

/// Throws std::invalid_argument if the point lies outside the mesh.
ProbeFunctional probe_functional(const Mesh& mesh, const ProbeSpec& probe);

struct Moments {
  Vector mean;      // one (u, p) block
  Vector variance;  // same layout
};

/// mean = mode 0, variance = sum_{k >= 1} coeff_k^2.
Moments moments(const StochasticSolution& sol);

/// Velocity part of a field integrated over the domain (both components summed).
double integrate_velocity(const Mesh& mesh, const Vector& block);

/// Values of the gPC surrogate of one probe at n standard-normal draws (seeded).
std::vector<double> surrogate_samples(const StochasticSolution& sol, const MultiIndexSet& basis,
                                      const ProbeFunctional& probe, int n, std::uint64_t seed);

struct PdfCurve {
  std::vector<double> x;
  std::vector<double> density;
  double bandwidth = 0.0;
  int samples = 0;

  double integral() const;
  std::string to_csv() const;
};

/// Gaussian KDE with Silverman's bandwidth 0.9 min(sd, IQR / 1.34) n^{-1/5}, evaluated on
/// `grid` points over [min - 5h, max + 5h]. A degenerate sample set gets a tiny bandwidth
/// relative to its magnitude, so the curve is a narrow spike.
PdfCurve kde(const std::vector<double>& samples, int grid = 512);

/// Probe pdf of a gPC solution: surrogate sampling followed by kde.
PdfCurve probe_pdf(const StochasticSolution& sol, const MultiIndexSet& basis, const Mesh& mesh, const ProbeSpec& probe,
                   std::uint64_t seed);

/// Integral of |a - b| on a common grid (linear interpolation, zero outside each support).
double l1_distance(const PdfCurve& a, const PdfCurve& b);

/// Empirical quantile (linear interpolation between order statistics).
double quantile(std::vector<double> values, double q);

struct SummaryStats {
  double mean = 0.0;
  double variance = 0.0;
  double std_error = 0.0;
  int n = 0;
};
SummaryStats summarize(const std::vector<double>& values);

/// One method's outputs on a common problem, as consumed by compare_methods.
struct MethodOutput {
  std::string name;
  Moments moments;
  std::vector<ProbeSpec> probes;
  std::vector<PdfCurve> pdfs;
  std::vector<SummaryStats> probe_stats;
};

struct MethodComparison {
  std::string a, b;
  double mean_velocity_rel_diff = 0.0;
  double variance_velocity_rel_diff = 0.0;
  std::vector<double> pdf_l1;
  std::vector<double> probe_mean_diff_in_std_errors;

  std::string to_json() const;
};

/// Throws std::invalid_argument when the two outputs are not on the same problem
/// (different block sizes or probe lists).
MethodComparison compare_methods(const MethodOutput& a, const MethodOutput& b, int n_u);

}  // namespace sgns
