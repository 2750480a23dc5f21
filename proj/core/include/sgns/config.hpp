#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sgns/mesh.hpp"
#include "sgns/nonlinear.hpp"
#include "sgns/postproc.hpp"
#include "sgns/random_field.hpp"

namespace sgns {

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

enum class Method { Galerkin, MonteCarlo, Collocation };
const char* to_string(Method m);
Method method_from_string(const std::string& s);

struct ExperimentConfig {
  Geometry geometry = Geometry::Channel;
  int nx = 96;
  int ny = 16;
  std::optional<Rect> obstacle = default_obstacle();
  double re0 = 100.0;
  double cov = 0.1;
  int N = 2;
  int P = 3;
  CovarianceSpec correlation{0.0, 3.0, 0.5};  // sigma_g is derived from cov
  Method method = Method::Galerkin;
  PreconditionerSpec precond;
  FgmresConfig fgmres;
  NonlinearConfig nonlinear;  // n_picard defaults from re0
  int mc_samples = 1000;
  int smolyak_level = 4;
  bool warm_start = true;  // sampling methods start from a Galerkin surrogate when available
  std::vector<ProbeSpec> probes;
  std::string out = "out";
  std::uint64_t seed = 1;

  /// Mean viscosity 2 / Re0 (unit inflow peak velocity, channel height 2).
  double mean_viscosity() const { return 2.0 / re0; }
  int coefficient_degree() const { return 2 * P; }

  /// Reject inconsistent settings with ConfigError.
  void validate() const;
  std::string to_json() const;
};

/// Parse JSON text. Unknown keys are errors. Throws ConfigError.
ExperimentConfig parse_config(const std::string& json_text);
/// Throws IoError if the file cannot be read, ConfigError if it is invalid.
ExperimentConfig load_config(const std::string& path);

struct ExperimentSetup {
  std::shared_ptr<const Mesh> mesh;
  BoundaryFunction bc;
  KLExpansion kl;
  StochasticViscosity viscosity;
};

ExperimentSetup setup_experiment(const ExperimentConfig& cfg);

}  // namespace sgns
