#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "commands.hpp"
#include "sgns/io.hpp"

using namespace sgns;
using namespace sgns::cli;

namespace {

enum Exit { kOk = 0, kConfig = 1, kSolver = 2, kIo = 3 };

void add_common(CLI::App* cmd, std::string& config, Overrides& o) {
  cmd->add_option("--config", config, "Experiment config (JSON)");
  cmd->add_option("--out", o.out, "Output directory");
  cmd->add_option("--seed", o.seed, "Random seed");
  cmd->add_option("--method", o.method, "galerkin | mc | collocation")
      ->check(CLI::IsMember({"galerkin", "mc", "collocation"}));
  cmd->add_option("--precond", o.precond, "mb | k | bgs | ahgs | ahgs-pcd | ahgs-pcd-it")
      ->check(CLI::IsMember({"mb", "k", "bgs", "ahgs", "ahgs-pcd", "ahgs-pcd-it"}));
  cmd->add_option("--trunc", o.trunc, "Degree cutoff l_t of the coupling products in ahGS");
  cmd->add_flag("--quiet", o.quiet, "Suppress progress output");
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv, argv + argc);
  CLI::App app{"Stochastic Galerkin Navier-Stokes solver"};
  app.require_subcommand(1);
  app.set_version_flag("--version", SGNS_VERSION);

  std::string config;
  Overrides o;
  BenchGrid grid;
  std::string report_dir;

  auto* mesh = app.add_subcommand("mesh", "Build the mesh and random field; export VTK/CSV");
  auto* solve = app.add_subcommand("solve", "Solve with the configured method");
  auto* bench = app.add_subcommand("precond-bench", "Iteration counts over a preconditioner sweep");
  auto* compare = app.add_subcommand("compare", "Galerkin vs collocation vs Monte Carlo");
  auto* report = app.add_subcommand("report", "Collate the outputs of a run directory");
  for (auto* c : {mesh, solve, bench, compare}) add_common(c, config, o);
  bench->add_option("--N", grid.N, "Stochastic dimensions")->delimiter(',');
  bench->add_option("--P", grid.P, "Solution degrees")->delimiter(',');
  bench->add_option("--cov", grid.cov, "Coefficients of variation")->delimiter(',');
  bench->add_option("--kinds", grid.kinds, "Preconditioners")->delimiter(',');
  bench->add_option("--lt", grid.l_t, "Degree cutoffs for ahGS kinds (-1: 2P)")->delimiter(',');
  bench->add_option("--step", grid.step, "Linearization: picard | newton");
  report->add_option("dir", report_dir, "Run directory")->required();
  report->add_option("--out", o.out, "Where to write the summary (default: the run directory)");
  report->add_flag("--quiet", o.quiet, "Do not print the summary");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  try {
    if (report->parsed()) return run_report(report_dir, o, args);
    if (bench->parsed() && o.trunc) grid.l_t = {*o.trunc};
    const ExperimentConfig cfg = resolve_config(config, o);
    if (mesh->parsed()) return run_mesh(cfg, o, args);
    if (solve->parsed()) return run_solve(cfg, o, args);
    if (bench->parsed()) return run_precond_bench(cfg, grid, o, args);
    return run_compare(cfg, o, args);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kIo;
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return kSolver;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kSolver;
  }
}
