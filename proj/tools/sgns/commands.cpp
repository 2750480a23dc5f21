#include "commands.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "json.hpp"
#include "sgns/io.hpp"
#include "sgns/sampling.hpp"

namespace sgns::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

void say(const Overrides& o, const std::string& msg) {
  if (!o.quiet) std::cerr << msg << '\n';
}

fs::path prepare_out(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());
  return fs::path(dir);
}

void write_json(const fs::path& path, const json& j) { write_text(path.string(), j.dump(2) + "\n"); }

void write_manifest(const fs::path& dir, const std::string& command, const std::vector<std::string>& argv,
                    const ExperimentConfig* cfg, const json& extra = json::object(),
                    const std::string& file = "manifest.json") {
  json m;
  m["command"] = command;
  m["argv"] = argv;
  m["version"] = SGNS_VERSION;
  m["compiler"] = __VERSION__;
  m["sparse_lu"] = SparseLU::backend();
  if (cfg) {
    m["seed"] = cfg->seed;
    m["config"] = json::parse(cfg->to_json());
  }
  for (const auto& [k, v] : extra.items()) m[k] = v;
  write_json(dir / file, m);
}

std::vector<ProbeSpec> probes_for(const ExperimentConfig& cfg) {
  if (!cfg.probes.empty()) return cfg.probes;
  if (cfg.geometry == Geometry::Channel) return {{{4.01, -0.4339}, ProbeField::Ux}, {{4.01, 0.4339}, ProbeField::Ux}};
  return {{{0.0, 0.5}, ProbeField::Ux}};
}

std::vector<ProbeFunctional> functionals(const Mesh& mesh, const std::vector<ProbeSpec>& probes) {
  std::vector<ProbeFunctional> f;
  for (const auto& p : probes) f.push_back(probe_functional(mesh, p));
  return f;
}

json probe_json(const ProbeSpec& p) { return {{"x", p.point.x}, {"y", p.point.y}, {"field", to_string(p.field)}}; }

/// Mean and variance of (u_x, u_y, p) as nodal fields.
std::vector<NamedField> moment_fields(const Mesh& mesh, const Moments& m) {
  const int nv = mesh.num_velocity_nodes(), nu = mesh.n_u(), np = mesh.n_p();
  return {{"mean_ux", m.mean.head(nv)},
          {"mean_uy", m.mean.segment(nv, nv)},
          {"mean_p", pressure_to_nodes(mesh, m.mean.segment(nu, np))},
          {"var_ux", m.variance.head(nv)},
          {"var_uy", m.variance.segment(nv, nv)},
          {"var_p", pressure_to_nodes(mesh, m.variance.segment(nu, np))}};
}

void write_fields(const fs::path& dir, const Mesh& mesh, const Moments& m) {
  const auto fields = moment_fields(mesh, m);
  write_vtk((dir / "fields.vtk").string(), mesh, fields);
  write_nodal_csv((dir / "fields.csv").string(), mesh, fields);
}

json pdf_summary(const ProbeSpec& p, const std::vector<double>& values, const PdfCurve& pdf) {
  const auto s = summarize(values);
  json j = probe_json(p);
  j["samples"] = s.n;
  j["mean"] = s.mean;
  j["variance"] = s.variance;
  j["q05"] = quantile(values, 0.05);
  j["q95"] = quantile(values, 0.95);
  j["bandwidth"] = pdf.bandwidth;
  return j;
}

struct GalerkinRun {
  GalerkinProblem problem;
  HybridResult result;
};

std::unique_ptr<GalerkinRun> galerkin(const ExperimentConfig& cfg, const ExperimentSetup& s, const Overrides& o) {
  auto r = std::make_unique<GalerkinRun>();
  r->problem = make_galerkin_problem(s.mesh, s.viscosity, cfg.P, s.bc);
  say(o, "galerkin: ngdof " + std::to_string(r->problem.layout.ngdof()) + ", M " + std::to_string(r->problem.M()) +
             ", M_nu " + std::to_string(r->problem.M_nu()));
  r->result = hybrid_solve(r->problem, cfg.nonlinear);
  say(o, std::string("galerkin: ") + to_string(r->result.report.status) + ", " +
             std::to_string(r->result.report.count(StepType::Picard)) + " Picard, " +
             std::to_string(r->result.report.count(StepType::Newton)) + " Newton");
  return r;
}

SamplingConfig sampling_config(const ExperimentConfig& cfg, const GalerkinRun* warm) {
  SamplingConfig sc;
  sc.nonlinear = cfg.nonlinear;
  sc.nonlinear.linear.direct = true;
  if (warm && warm->result.report.status == SolveStatus::Converged) sc.warm_start = &warm->result.solution;
  return sc;
}

json ensemble_json(const SampleEnsemble& e) {
  int steps = 0;
  for (int n : e.nonlinear_steps) steps += n;
  return {{"samples", e.size()},
          {"failures", e.failures},
          {"negative_viscosity_samples", e.negative_viscosity_samples},
          {"mean_nonlinear_steps", e.size() ? static_cast<double>(steps) / e.size() : 0.0}};
}

/// One method's outputs, also written to dir with the given file prefix.
MethodOutput method_output(const std::string& name, const fs::path& dir, const std::string& prefix,
                           const std::vector<ProbeSpec>& probes, const Moments& m,
                           const std::vector<std::vector<double>>& probe_values, const std::vector<double>& exact_means,
                           json& summary) {
  MethodOutput out;
  out.name = name;
  out.moments = m;
  out.probes = probes;
  for (std::size_t i = 0; i < probes.size(); ++i) {
    const auto& v = probe_values[i];
    out.pdfs.push_back(kde(v));
    write_text((dir / (prefix + "pdf_" + std::to_string(i) + ".csv")).string(), out.pdfs.back().to_csv());
    SummaryStats st = summarize(v);
    // Surrogate methods know the mean exactly (mode 0); only sampling carries a standard error.
    if (!exact_means.empty()) {
      st.mean = exact_means[i];
      st.std_error = 0.0;
    }
    out.probe_stats.push_back(st);
    summary["probes"].push_back(pdf_summary(probes[i], v, out.pdfs.back()));
  }
  return out;
}

std::vector<std::vector<double>> surrogate_probe_values(const StochasticSolution& sol, const MultiIndexSet& basis,
                                                        const std::vector<ProbeSpec>& probes,
                                                        const std::vector<ProbeFunctional>& fn, std::uint64_t seed) {
  std::vector<std::vector<double>> v;
  for (std::size_t i = 0; i < probes.size(); ++i) v.push_back(surrogate_samples(sol, basis, fn[i], probes[i].samples, seed + i));
  return v;
}

std::vector<double> mode0_values(const StochasticSolution& sol, const std::vector<ProbeFunctional>& fn) {
  std::vector<double> v;
  for (const auto& f : fn) v.push_back(f(sol.coeffs.data()));
  return v;
}

void write_probe_samples(const fs::path& path, const SampleEnsemble& e) {
  std::ostringstream os;
  os.precision(17);
  os << "sample";
  for (std::size_t d = 0; d < (e.points.empty() ? 0 : e.points[0].size()); ++d) os << ",xi" << d + 1;
  for (std::size_t p = 0; p < e.probe_values.size(); ++p) os << ",probe" << p;
  os << '\n';
  for (int q = 0; q < e.size(); ++q) {
    os << q;
    for (double x : e.points[q]) os << ',' << x;
    for (const auto& pv : e.probe_values) os << ',' << pv[q];
    os << '\n';
  }
  write_text(path.string(), os.str());
}

}  // namespace

ExperimentConfig resolve_config(const std::string& path, const Overrides& o) {
  ExperimentConfig c;
  try {
    c = path.empty() ? parse_config("{}") : load_config(path);
  } catch (const IoError& e) {
    throw ConfigError(e.what());  // an unreadable config is a config error, not an output failure
  }
  if (o.out) c.out = *o.out;
  if (o.seed) c.seed = *o.seed;
  if (o.method) c.method = method_from_string(*o.method);
  try {
    if (o.precond) c.precond.kind = precond_from_string(*o.precond);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (o.trunc) c.precond.l_t = *o.trunc;
  c.nonlinear.linear.precond = c.precond;
  c.nonlinear.linear.fgmres = c.fgmres;
  c.validate();
  return c;
}

int run_mesh(const ExperimentConfig& cfg, const Overrides& o, const std::vector<std::string>& argv) {
  const fs::path dir = prepare_out(cfg.out);
  const ExperimentSetup s = setup_experiment(cfg);
  const Mesh& m = *s.mesh;
  std::vector<NamedField> fields{{"mean_viscosity", s.viscosity.coeffs[0]}, {"g0", s.kl.g0}};
  for (std::size_t j = 0; j < s.kl.modes.size(); ++j) fields.emplace_back("g" + std::to_string(j + 1), s.kl.modes[j]);
  write_vtk((dir / "mesh.vtk").string(), m, fields);
  write_nodal_csv((dir / "mesh.csv").string(), m, fields);
  fs::create_directories(dir / "triple_products");
  write_triple_products((dir / "triple_products").string(), triple_products(cfg.N, cfg.P, cfg.coefficient_degree()));
  json info{{"elements", m.num_elements()},
            {"velocity_nodes", m.num_velocity_nodes()},
            {"n_u", m.n_u()},
            {"n_p", m.n_p()},
            {"boundary_edges", m.boundary.size()},
            {"area", m.area()},
            {"kl_eigenvalues", s.kl.eigenvalues},
            {"kl_variance_scale", s.kl.variance_scale}};
  write_json(dir / "mesh.json", info);
  write_manifest(dir, "mesh", argv, &cfg);
  say(o, "mesh: " + std::to_string(m.num_elements()) + " elements, n_u " + std::to_string(m.n_u()) + ", n_p " +
             std::to_string(m.n_p()));
  return 0;
}

int run_solve(const ExperimentConfig& cfg, const Overrides& o, const std::vector<std::string>& argv) {
  const fs::path dir = prepare_out(cfg.out);
  write_manifest(dir, "solve", argv, &cfg);
  const ExperimentSetup s = setup_experiment(cfg);
  const Mesh& mesh = *s.mesh;
  const auto probes = probes_for(cfg);
  const auto fn = functionals(mesh, probes);
  json summary{{"method", to_string(cfg.method)}, {"probes", json::array()}};
  bool ok = true;

  std::unique_ptr<GalerkinRun> g;
  if (cfg.method == Method::Galerkin || cfg.warm_start) g = galerkin(cfg, s, o);

  if (cfg.method == Method::Galerkin) {
    const auto& r = g->result;
    write_text((dir / "report.json").string(), r.report.to_json() + "\n");
    write_text((dir / "history.csv").string(), r.report.history_csv());
    ok = r.report.status == SolveStatus::Converged;
    write_fields(dir, mesh, moments(r.solution));
    method_output("galerkin", dir, "", probes, moments(r.solution),
                  surrogate_probe_values(r.solution, g->problem.basis, probes, fn, cfg.seed), {}, summary);
  } else if (cfg.method == Method::MonteCarlo) {
    const auto r = monte_carlo(s.viscosity, mesh, s.bc, cfg.mc_samples, cfg.seed, sampling_config(cfg, g.get()), fn);
    summary["ensemble"] = ensemble_json(r.ensemble);
    write_probe_samples(dir / "probe_samples.csv", r.ensemble);
    write_fields(dir, mesh, r.moments);
    method_output("mc", dir, "", probes, r.moments, r.ensemble.probe_values, {}, summary);
  } else {
    const auto rule = smolyak_rule(cfg.smolyak_level, cfg.N);
    const auto basis = total_degree_indices(cfg.N, cfg.P);
    const auto r = collocation(s.viscosity, mesh, s.bc, rule, basis, sampling_config(cfg, g.get()), fn);
    summary["ensemble"] = ensemble_json(r.ensemble);
    write_probe_samples(dir / "probe_samples.csv", r.ensemble);
    write_fields(dir, mesh, moments(r.solution));
    method_output("collocation", dir, "", probes, moments(r.solution),
                  surrogate_probe_values(r.solution, basis, probes, fn, cfg.seed), {}, summary);
  }
  write_json(dir / "summary.json", summary);
  say(o, "solve: outputs in " + dir.string());
  return ok ? 0 : 2;
}

int run_precond_bench(const ExperimentConfig& base, const BenchGrid& grid, const Overrides& o,
                      const std::vector<std::string>& argv) {
  if (grid.step != "picard" && grid.step != "newton") throw ConfigError("--step must be picard or newton");
  std::vector<PrecondKind> kinds;
  try {
    for (const auto& k : grid.kinds) kinds.push_back(precond_from_string(k));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const fs::path dir = prepare_out(base.out);
  write_manifest(dir, "precond-bench", argv, &base,
                 {{"grid", {{"N", grid.N}, {"P", grid.P}, {"cov", grid.cov}, {"kinds", grid.kinds}, {"l_t", grid.l_t},
                            {"step", grid.step}}}});
  std::ostringstream csv;
  csv << kBenchHeader << '\n';
  bool all_converged = true;
  for (int N : grid.N)
    for (int P : grid.P)
      for (double cov : grid.cov) {
        ExperimentConfig cfg = base;
        cfg.N = N;
        cfg.P = P;
        cfg.cov = cov;
        cfg.validate();
        const ExperimentSetup s = setup_experiment(cfg);
        const GalerkinProblem pr = make_galerkin_problem(s.mesh, s.viscosity, P, s.bc);
        LinearSolverSettings ls = cfg.nonlinear.linear;
        ls.precond = {PrecondKind::AHGS, -1, cfg.precond.inner_iters};
        StochasticSolution at = solve_stochastic_stokes(pr, ls);
        if (grid.step == "newton") {
          NonlinearConfig nc = cfg.nonlinear;
          nc.linear = ls;
          nc.max_newton = 0;
          nc.tol = 1e-300;
          at = hybrid_solve(pr, nc).solution;
        }
        GalerkinState state(pr, at);
        state.rebuild();
        const KronSumOperator op =
            build_linearized_operator(state, grid.step == "newton" ? Linearization::Newton : Linearization::Picard);
        const Vector rhs = global_residual(state);
        const PcdOperators pcd = pcd_for_state(state);
        for (PrecondKind kind : kinds) {
          const bool hierarchical = kind == PrecondKind::AHGS || kind == PrecondKind::AHGS_PCD || kind == PrecondKind::AHGS_PCD_IT;
          const std::vector<int> cutoffs = hierarchical ? grid.l_t : std::vector<int>{-1};
          for (int lt : cutoffs) {
            const int l_t = lt < 0 || lt > 2 * P ? 2 * P : lt;
            const auto pre = make_preconditioner(op, {kind, l_t, cfg.precond.inner_iters}, &pcd);
            const auto r = fgmres(operator_map(op), pre->as_map(), rhs, cfg.fgmres);
            all_converged = all_converged && r.converged;
            csv << N << ',' << P << ',' << cov << ',' << to_string(kind) << ',' << l_t << ',' << r.iterations << ','
                << pr.layout.ngdof() << ',' << pr.M() << ',' << pr.M_nu() << '\n';
            say(o, "precond-bench: N=" + std::to_string(N) + " P=" + std::to_string(P) + " CoV=" + std::to_string(cov) +
                       " " + to_string(kind) + " l_t=" + std::to_string(l_t) + ": " + std::to_string(r.iterations) +
                       (r.converged ? "" : " (not converged)"));
          }
        }
      }
  write_text((dir / "precond_bench.csv").string(), csv.str());
  if (!o.quiet) std::cout << csv.str();
  return all_converged ? 0 : 2;
}

int run_compare(const ExperimentConfig& cfg, const Overrides& o, const std::vector<std::string>& argv) {
  const fs::path dir = prepare_out(cfg.out);
  write_manifest(dir, "compare", argv, &cfg);
  const ExperimentSetup s = setup_experiment(cfg);
  const Mesh& mesh = *s.mesh;
  const auto probes = probes_for(cfg);
  const auto fn = functionals(mesh, probes);

  auto g = galerkin(cfg, s, o);
  if (g->result.report.status != SolveStatus::Converged) throw SolverError("galerkin solve did not converge");
  json summary{{"galerkin", {{"report", json::parse(g->result.report.to_json())}, {"probes", json::array()}}}};
  const auto& sol = g->result.solution;
  const MethodOutput mg = method_output("galerkin", dir, "galerkin_", probes, moments(sol),
                                        surrogate_probe_values(sol, g->problem.basis, probes, fn, cfg.seed),
                                        mode0_values(sol, fn), summary["galerkin"]);

  const auto sc = sampling_config(cfg, cfg.warm_start ? g.get() : nullptr);
  say(o, "compare: collocation");
  const auto col = collocation(s.viscosity, mesh, s.bc, smolyak_rule(cfg.smolyak_level, cfg.N), g->problem.basis, sc, fn);
  summary["collocation"] = {{"ensemble", ensemble_json(col.ensemble)}, {"probes", json::array()}};
  const MethodOutput mc = method_output("collocation", dir, "collocation_", probes, moments(col.solution),
                                        surrogate_probe_values(col.solution, g->problem.basis, probes, fn, cfg.seed),
                                        mode0_values(col.solution, fn), summary["collocation"]);

  say(o, "compare: monte carlo, " + std::to_string(cfg.mc_samples) + " samples");
  const auto mcr = monte_carlo(s.viscosity, mesh, s.bc, cfg.mc_samples, cfg.seed, sc, fn);
  summary["mc"] = {{"ensemble", ensemble_json(mcr.ensemble)}, {"probes", json::array()}};
  write_probe_samples(dir / "mc_probe_samples.csv", mcr.ensemble);
  const MethodOutput mm =
      method_output("mc", dir, "mc_", probes, mcr.moments, mcr.ensemble.probe_values, {}, summary["mc"]);

  const int nu = mesh.n_u();
  json comparisons = json::array();
  comparisons.push_back(json::parse(compare_methods(mg, mc, nu).to_json()));
  comparisons.push_back(json::parse(compare_methods(mm, mg, nu).to_json()));
  summary["comparisons"] = comparisons;
  write_json(dir / "comparison.json", summary);
  if (!o.quiet) std::cout << comparisons.dump(2) << '\n';
  return 0;
}

int run_report(const std::string& dir_name, const Overrides& o, const std::vector<std::string>& argv) {
  const fs::path dir(dir_name);
  if (!fs::is_directory(dir)) throw IoError("report: '" + dir_name + "' is not a directory");
  json out;
  std::ostringstream text;
  for (const char* name : {"manifest.json", "report.json", "summary.json", "comparison.json", "mesh.json"}) {
    const fs::path p = dir / name;
    if (!fs::exists(p)) continue;
    try {
      out[fs::path(name).stem().string()] = json::parse(read_text(p.string()));
    } catch (const json::exception& e) {
      throw IoError("report: cannot parse '" + p.string() + "': " + e.what());
    }
  }
  if (!out.contains("manifest")) throw IoError("report: no manifest.json in '" + dir_name + "'");
  text << "command: " << out["manifest"]["command"].get<std::string>() << '\n';
  if (out.contains("report")) {
    const auto& r = out["report"];
    text << "status: " << r["status"].get<std::string>() << ", Picard " << r["picard_steps"] << ", Newton "
         << r["newton_steps"] << ", final residual " << r["final_relative_residual"] << '\n';
  }
  for (const char* table : {"precond_bench.csv", "history.csv"}) {
    const fs::path p = dir / table;
    if (!fs::exists(p)) continue;
    const std::string csv = read_text(p.string());
    out[fs::path(table).stem().string()] = csv;
    text << table << ":\n" << csv;
  }
  if (out.contains("comparison")) {
    for (const auto& c : out["comparison"]["comparisons"])
      text << c["a"].get<std::string>() << " vs " << c["b"].get<std::string>() << ": mean "
           << c["mean_velocity_rel_diff"] << ", variance " << c["variance_velocity_rel_diff"] << '\n';
  }
  const fs::path target = prepare_out(o.out.value_or(dir_name));
  write_json(target / "report_summary.json", out);
  write_text((target / "report_summary.txt").string(), text.str());
  // Keep the source run's manifest intact when reporting in place.
  const bool in_place = fs::equivalent(target, dir);
  write_manifest(target, "report", argv, nullptr, {{"source", dir_name}},
                 in_place ? "report_manifest.json" : "manifest.json");
  if (!o.quiet) std::cout << text.str();
  return 0;
}

}  // namespace sgns::cli
