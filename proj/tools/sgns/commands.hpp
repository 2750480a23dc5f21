#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sgns/config.hpp"

namespace sgns::cli {

/// Command-line overrides applied on top of the config file.
struct Overrides {
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> method;
  std::optional<std::string> precond;
  std::optional<int> trunc;
  bool quiet = false;
};

struct BenchGrid {
  std::vector<int> N{2};
  std::vector<int> P{3};
  std::vector<double> cov{0.1, 0.2, 0.3};
  std::vector<std::string> kinds{"mb", "k", "bgs", "ahgs"};
  /// Degree cutoffs for the ahGS kinds; negative means 2P.
  std::vector<int> l_t{-1};
  std::string step = "picard";
};

/// Resolved config: file (or defaults when path is empty) plus overrides. Throws ConfigError.
ExperimentConfig resolve_config(const std::string& path, const Overrides& o);

/// Each command returns a process exit code and writes manifest.json into the output directory.
int run_mesh(const ExperimentConfig& cfg, const Overrides& o, const std::vector<std::string>& argv);
int run_solve(const ExperimentConfig& cfg, const Overrides& o, const std::vector<std::string>& argv);
int run_precond_bench(const ExperimentConfig& cfg, const BenchGrid& grid, const Overrides& o,
                      const std::vector<std::string>& argv);
int run_compare(const ExperimentConfig& cfg, const Overrides& o, const std::vector<std::string>& argv);
int run_report(const std::string& dir, const Overrides& o, const std::vector<std::string>& argv);

/// Header of the precond-bench table.
inline constexpr const char* kBenchHeader = "N,P,CoV,preconditioner,l_t,iters,ngdof,M,M_nu";

}  // namespace sgns::cli
