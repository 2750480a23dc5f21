#include "sgns/postproc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace sgns {

const char* to_string(ProbeField f) {
  switch (f) {
    case ProbeField::Ux: return "ux";
    case ProbeField::Uy: return "uy";
    case ProbeField::P: return "p";
  }
  return "?";
}

ProbeField probe_field_from_string(const std::string& s) {
  if (s == "ux") return ProbeField::Ux;
  if (s == "uy") return ProbeField::Uy;
  if (s == "p") return ProbeField::P;
  throw std::invalid_argument("unknown probe field '" + s + "' (expected ux|uy|p)");
}

double ProbeFunctional::operator()(const double* block) const {
  double v = 0.0;
  for (std::size_t i = 0; i < index.size(); ++i) v += weight[i] * block[index[i]];
  return v;
}

ProbeFunctional probe_functional(const Mesh& mesh, const ProbeSpec& probe) {
  const int e = mesh.locate(probe.point);
  if (e < 0)
    throw std::invalid_argument("probe point (" + std::to_string(probe.point.x) + ", " + std::to_string(probe.point.y) +
                                ") is outside the mesh");
  const auto& conn = mesh.elements[e];
  const Point lo = mesh.nodes[conn[0]], hi = mesh.nodes[conn[8]];
  const double s = std::clamp(2.0 * (probe.point.x - lo.x) / (hi.x - lo.x) - 1.0, -1.0, 1.0);
  const double t = std::clamp(2.0 * (probe.point.y - lo.y) / (hi.y - lo.y) - 1.0, -1.0, 1.0);
  ProbeFunctional f;
  if (probe.field == ProbeField::P) {
    const auto& pc = mesh.pressure_elements[e];
    const double ls[2] = {0.5 * (1 - s), 0.5 * (1 + s)}, lt[2] = {0.5 * (1 - t), 0.5 * (1 + t)};
    for (int b = 0; b < 2; ++b)
      for (int a = 0; a < 2; ++a) {
        f.index.push_back(mesh.n_u() + pc[2 * b + a]);
        f.weight.push_back(ls[a] * lt[b]);
      }
    return f;
  }
  const double qs[3] = {0.5 * s * (s - 1), 1 - s * s, 0.5 * s * (s + 1)};
  const double qt[3] = {0.5 * t * (t - 1), 1 - t * t, 0.5 * t * (t + 1)};
  const int shift = probe.field == ProbeField::Uy ? mesh.num_velocity_nodes() : 0;
  for (int b = 0; b < 3; ++b)
    for (int a = 0; a < 3; ++a) {
      f.index.push_back(shift + conn[3 * b + a]);
      f.weight.push_back(qs[a] * qt[b]);
    }
  return f;
}

Moments moments(const StochasticSolution& sol) {
  const auto& l = sol.layout;
  Moments m;
  m.mean = sol.coeffs.segment(0, l.block());
  m.variance = Vector::Zero(l.block());
  for (int k = 1; k < l.M; ++k) m.variance += sol.coeffs.segment(l.offset(k), l.block()).cwiseAbs2();
  return m;
}

double integrate_velocity(const Mesh& mesh, const Vector& block) {
  const int nv = mesh.num_velocity_nodes();
  return integrate(mesh, block.segment(0, nv)) + integrate(mesh, block.segment(nv, nv));
}

std::vector<double> surrogate_samples(const StochasticSolution& sol, const MultiIndexSet& basis,
                                      const ProbeFunctional& probe, int n, std::uint64_t seed) {
  const auto& l = sol.layout;
  if (basis.size() != l.M) throw std::invalid_argument("surrogate_samples: basis size does not match the solution");
  std::vector<double> c(static_cast<std::size_t>(l.M));
  for (int k = 0; k < l.M; ++k) c[k] = probe(sol.coeffs.data() + l.offset(k));
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> xi(static_cast<std::size_t>(basis.N)), out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    for (auto& x : xi) x = normal(gen);
    const Vector psi = evaluate_basis(basis, xi);
    double v = 0.0;
    for (int k = 0; k < l.M; ++k) v += c[k] * psi[k];
    out[i] = v;
  }
  return out;
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) throw std::invalid_argument("quantile of an empty sample");
  std::sort(v.begin(), v.end());
  const double pos = q * (v.size() - 1);
  const auto i = static_cast<std::size_t>(std::floor(pos));
  if (i + 1 >= v.size()) return v.back();
  return v[i] + (pos - i) * (v[i + 1] - v[i]);
}

SummaryStats summarize(const std::vector<double>& v) {
  SummaryStats s;
  s.n = static_cast<int>(v.size());
  if (v.empty()) return s;
  double mean = 0.0, m2 = 0.0;
  int k = 0;
  for (double x : v) {
    ++k;
    const double d = x - mean;
    mean += d / k;
    m2 += d * (x - mean);
  }
  s.mean = mean;
  s.variance = s.n > 1 ? m2 / (s.n - 1) : 0.0;
  s.std_error = std::sqrt(s.variance / s.n);
  return s;
}

double PdfCurve::integral() const {
  double a = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) a += 0.5 * (density[i] + density[i - 1]) * (x[i] - x[i - 1]);
  return a;
}

std::string PdfCurve::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "x,density\n";
  for (std::size_t i = 0; i < x.size(); ++i) os << x[i] << ',' << density[i] << '\n';
  return os.str();
}

PdfCurve kde(const std::vector<double>& samples, int grid) {
  if (samples.size() < 2) throw std::invalid_argument("kde: need at least two samples");
  if (grid < 16) throw std::invalid_argument("kde: grid too coarse");
  const SummaryStats st = summarize(samples);
  const double sd = std::sqrt(st.variance);
  const double iqr = quantile(samples, 0.75) - quantile(samples, 0.25);
  double spread = std::min(sd, iqr / 1.34);
  if (!(spread > 0.0)) spread = sd;
  const double n = static_cast<double>(samples.size());
  double h = 0.9 * spread * std::pow(n, -0.2);
  const double floor = 1e-9 * std::max(1.0, std::abs(st.mean));
  if (!(h > floor)) h = floor;

  const auto [mn, mx] = std::minmax_element(samples.begin(), samples.end());
  const double lo = *mn - 5.0 * h, hi = *mx + 5.0 * h;
  PdfCurve c;
  c.bandwidth = h;
  c.samples = static_cast<int>(samples.size());
  c.x.resize(static_cast<std::size_t>(grid));
  c.density.assign(static_cast<std::size_t>(grid), 0.0);
  for (int i = 0; i < grid; ++i) c.x[i] = lo + (hi - lo) * i / (grid - 1);

  // Each sample only touches grid points within 8 bandwidths.
  const double dx = (hi - lo) / (grid - 1);
  const double norm = 1.0 / (n * h * std::sqrt(2.0 * M_PI));
  for (double s : samples) {
    const int i0 = std::max(0, static_cast<int>(std::floor((s - 8.0 * h - lo) / dx)));
    const int i1 = std::min(grid - 1, static_cast<int>(std::ceil((s + 8.0 * h - lo) / dx)));
    for (int i = i0; i <= i1; ++i) {
      const double z = (c.x[i] - s) / h;
      c.density[i] += norm * std::exp(-0.5 * z * z);
    }
  }
  return c;
}

PdfCurve probe_pdf(const StochasticSolution& sol, const MultiIndexSet& basis, const Mesh& mesh, const ProbeSpec& probe,
                   std::uint64_t seed) {
  return kde(surrogate_samples(sol, basis, probe_functional(mesh, probe), probe.samples, seed));
}

namespace {
double interp(const PdfCurve& c, double x) {
  if (c.x.empty() || x < c.x.front() || x > c.x.back()) return 0.0;
  auto it = std::upper_bound(c.x.begin(), c.x.end(), x);
  if (it == c.x.end()) return c.density.back();
  const std::size_t i = static_cast<std::size_t>(it - c.x.begin());
  if (i == 0) return c.density.front();
  const double t = (x - c.x[i - 1]) / (c.x[i] - c.x[i - 1]);
  return (1 - t) * c.density[i - 1] + t * c.density[i];
}
}  // namespace

double l1_distance(const PdfCurve& a, const PdfCurve& b) {
  if (a.x.empty() || b.x.empty()) throw std::invalid_argument("l1_distance: empty curve");
  const double lo = std::min(a.x.front(), b.x.front()), hi = std::max(a.x.back(), b.x.back());
  // Resolve the narrower curve with several points per bandwidth.
  const double step = std::min(a.x[1] - a.x[0], b.x[1] - b.x[0]);
  const int n = std::clamp(static_cast<int>((hi - lo) / step) + 1, 2048, 1 << 22);
  double sum = 0.0, prev = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = lo + (hi - lo) * i / (n - 1);
    const double d = std::abs(interp(a, x) - interp(b, x));
    if (i > 0) sum += 0.5 * (d + prev) * (hi - lo) / (n - 1);
    prev = d;
  }
  return sum;
}

std::string MethodComparison::to_json() const {
  nlohmann::ordered_json j;
  j["a"] = a;
  j["b"] = b;
  j["mean_velocity_rel_diff"] = mean_velocity_rel_diff;
  j["variance_velocity_rel_diff"] = variance_velocity_rel_diff;
  j["pdf_l1"] = pdf_l1;
  j["probe_mean_diff_in_std_errors"] = probe_mean_diff_in_std_errors;
  return j.dump(2);
}

MethodComparison compare_methods(const MethodOutput& a, const MethodOutput& b, int n_u) {
  if (a.moments.mean.size() != b.moments.mean.size() || a.moments.variance.size() != b.moments.variance.size())
    throw std::invalid_argument("compare_methods: moment fields have different sizes");
  if (a.probes.size() != b.probes.size())
    throw std::invalid_argument("compare_methods: different probe lists");
  for (std::size_t i = 0; i < a.probes.size(); ++i)
    if (a.probes[i].point.x != b.probes[i].point.x || a.probes[i].point.y != b.probes[i].point.y ||
        a.probes[i].field != b.probes[i].field)
      throw std::invalid_argument("compare_methods: different probe lists");
  if (n_u > a.moments.mean.size()) throw std::invalid_argument("compare_methods: n_u exceeds block size");

  MethodComparison c;
  c.a = a.name;
  c.b = b.name;
  auto rel = [n_u](const Vector& x, const Vector& y) {
    const double d = (x.head(n_u) - y.head(n_u)).norm(), s = y.head(n_u).norm();
    return s > 0 ? d / s : d;
  };
  c.mean_velocity_rel_diff = rel(a.moments.mean, b.moments.mean);
  c.variance_velocity_rel_diff = rel(a.moments.variance, b.moments.variance);
  for (std::size_t i = 0; i < a.pdfs.size() && i < b.pdfs.size(); ++i) c.pdf_l1.push_back(l1_distance(a.pdfs[i], b.pdfs[i]));
  for (std::size_t i = 0; i < a.probe_stats.size() && i < b.probe_stats.size(); ++i) {
    const double se = std::hypot(a.probe_stats[i].std_error, b.probe_stats[i].std_error);
    const double d = std::abs(a.probe_stats[i].mean - b.probe_stats[i].mean);
    c.probe_mean_diff_in_std_errors.push_back(se > 0 ? d / se : (d == 0 ? 0.0 : INFINITY));
  }
  return c;
}

}  // namespace sgns
