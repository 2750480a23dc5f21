#include "sgns/config.hpp"

#include "json.hpp"

#include "sgns/io.hpp"

namespace sgns {

using json = nlohmann::ordered_json;

const char* to_string(Method m) {
  switch (m) {
    case Method::Galerkin: return "galerkin";
    case Method::MonteCarlo: return "mc";
    case Method::Collocation: return "collocation";
  }
  return "?";
}

Method method_from_string(const std::string& s) {
  if (s == "galerkin") return Method::Galerkin;
  if (s == "mc") return Method::MonteCarlo;
  if (s == "collocation") return Method::Collocation;
  throw ConfigError("unknown method '" + s + "' (expected galerkin|mc|collocation)");
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& m) { throw ConfigError(m); };
  if (nx < 2 || ny < 2) fail("nx and ny must be >= 2");
  if (!(re0 > 0)) fail("re0 must be positive");
  if (!(cov >= 0 && cov < 1)) fail("cov must satisfy 0 <= cov < 1");
  if (N < 1) fail("N must be >= 1");
  if (P < 0) fail("P must be >= 0");
  if (!(correlation.Lx > 0 && correlation.Ly > 0)) fail("correlation lengths must be positive");
  if (precond.l_t > coefficient_degree()) fail("preconditioner l_t must not exceed 2P");
  if (precond.inner_iters < 1) fail("inner_iters must be >= 1");
  if (!(fgmres.tol > 0) || fgmres.max_iter < 1 || fgmres.restart < 0) fail("invalid fgmres settings");
  if (nonlinear.n_picard < 0 || nonlinear.max_newton < 0 || !(nonlinear.tol > 0)) fail("invalid nonlinear settings");
  if (mc_samples < 2) fail("mc.samples must be >= 2");
  if (smolyak_level < 1) fail("collocation.level must be >= 1");
  if (geometry == Geometry::Cavity && obstacle) fail("the cavity has no obstacle");
  for (const auto& p : probes)
    if (p.samples < 2) fail("probe samples must be >= 2");
}

namespace {

template <class T>
T get(const json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

void reject_unknown(const json& j, std::initializer_list<const char*> keys, const std::string& where) {
  for (const auto& [k, v] : j.items()) {
    bool ok = false;
    for (const char* allowed : keys) ok |= (k == allowed);
    if (!ok) throw ConfigError("unknown key '" + k + "' in " + where);
  }
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  ExperimentConfig c;
  try {
    reject_unknown(j, {"geometry", "nx", "ny", "obstacle", "re0", "cov", "N", "P", "correlation", "method",
                       "preconditioner", "fgmres", "nonlinear", "mc", "collocation", "warm_start", "probes", "out",
                       "seed"},
                   "config");
    const std::string geom = get<std::string>(j, "geometry", "channel");
    if (geom == "channel") {
      c.geometry = Geometry::Channel;
    } else if (geom == "cavity") {
      c.geometry = Geometry::Cavity;
      c.obstacle.reset();
    } else {
      throw ConfigError("unknown geometry '" + geom + "' (expected channel|cavity)");
    }
    c.nx = get(j, "nx", c.nx);
    c.ny = get(j, "ny", c.ny);
    if (j.contains("obstacle")) {
      const auto& o = j.at("obstacle");
      if (o.is_boolean()) {
        c.obstacle = o.get<bool>() ? std::optional<Rect>(default_obstacle()) : std::nullopt;
      } else if (o.is_array() && o.size() == 4) {
        c.obstacle = Rect{o[0].get<double>(), o[1].get<double>(), o[2].get<double>(), o[3].get<double>()};
      } else {
        throw ConfigError("obstacle must be true, false or [x0, x1, y0, y1]");
      }
    }
    c.re0 = get(j, "re0", c.re0);
    c.cov = get(j, "cov", c.cov);
    c.N = get(j, "N", c.N);
    c.P = get(j, "P", c.P);
    if (j.contains("correlation")) {
      const auto& k = j.at("correlation");
      reject_unknown(k, {"Lx", "Ly"}, "correlation");
      c.correlation.Lx = get(k, "Lx", c.correlation.Lx);
      c.correlation.Ly = get(k, "Ly", c.correlation.Ly);
    }
    c.method = method_from_string(get<std::string>(j, "method", "galerkin"));
    if (j.contains("preconditioner")) {
      const auto& k = j.at("preconditioner");
      reject_unknown(k, {"kind", "l_t", "inner_iters"}, "preconditioner");
      try {
        c.precond.kind = precond_from_string(get<std::string>(k, "kind", "ahgs"));
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
      c.precond.l_t = get(k, "l_t", c.precond.l_t);
      c.precond.inner_iters = get(k, "inner_iters", c.precond.inner_iters);
    }
    if (j.contains("fgmres")) {
      const auto& k = j.at("fgmres");
      reject_unknown(k, {"tol", "max_iter", "restart"}, "fgmres");
      c.fgmres.tol = get(k, "tol", c.fgmres.tol);
      c.fgmres.max_iter = get(k, "max_iter", c.fgmres.max_iter);
      c.fgmres.restart = get(k, "restart", c.fgmres.restart);
    }
    c.nonlinear.n_picard = default_picard_steps(c.re0);
    if (j.contains("nonlinear")) {
      const auto& k = j.at("nonlinear");
      reject_unknown(k, {"n_picard", "max_newton", "tol", "inexact_picard"}, "nonlinear");
      c.nonlinear.n_picard = get(k, "n_picard", c.nonlinear.n_picard);
      c.nonlinear.max_newton = get(k, "max_newton", c.nonlinear.max_newton);
      c.nonlinear.tol = get(k, "tol", c.nonlinear.tol);
      c.nonlinear.inexact_picard = get(k, "inexact_picard", c.nonlinear.inexact_picard);
    }
    if (j.contains("mc")) {
      reject_unknown(j.at("mc"), {"samples"}, "mc");
      c.mc_samples = get(j.at("mc"), "samples", c.mc_samples);
    }
    if (j.contains("collocation")) {
      reject_unknown(j.at("collocation"), {"level"}, "collocation");
      c.smolyak_level = get(j.at("collocation"), "level", c.smolyak_level);
    }
    c.warm_start = get(j, "warm_start", c.warm_start);
    if (j.contains("probes")) {
      for (const auto& p : j.at("probes")) {
        reject_unknown(p, {"x", "y", "field", "samples"}, "probe");
        ProbeSpec s;
        s.point = {p.at("x").get<double>(), p.at("y").get<double>()};
        try {
          s.field = probe_field_from_string(get<std::string>(p, "field", "ux"));
        } catch (const std::invalid_argument& e) {
          throw ConfigError(e.what());
        }
        s.samples = get(p, "samples", s.samples);
        c.probes.push_back(s);
      }
    }
    c.out = get(j, "out", c.out);
    c.seed = get<std::uint64_t>(j, "seed", c.seed);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  c.nonlinear.linear.precond = c.precond;
  c.nonlinear.linear.fgmres = c.fgmres;
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) { return parse_config(read_text(path)); }

std::string ExperimentConfig::to_json() const {
  json j;
  j["geometry"] = geometry == Geometry::Channel ? "channel" : "cavity";
  j["nx"] = nx;
  j["ny"] = ny;
  if (obstacle) {
    j["obstacle"] = {obstacle->x0, obstacle->x1, obstacle->y0, obstacle->y1};
  } else {
    j["obstacle"] = false;
  }
  j["re0"] = re0;
  j["cov"] = cov;
  j["N"] = N;
  j["P"] = P;
  j["correlation"] = {{"Lx", correlation.Lx}, {"Ly", correlation.Ly}};
  j["method"] = to_string(method);
  j["preconditioner"] = {{"kind", to_string(precond.kind)}, {"l_t", precond.l_t}, {"inner_iters", precond.inner_iters}};
  j["fgmres"] = {{"tol", fgmres.tol}, {"max_iter", fgmres.max_iter}, {"restart", fgmres.restart}};
  j["nonlinear"] = {{"n_picard", nonlinear.n_picard},
                    {"max_newton", nonlinear.max_newton},
                    {"tol", nonlinear.tol},
                    {"inexact_picard", nonlinear.inexact_picard}};
  j["mc"] = {{"samples", mc_samples}};
  j["collocation"] = {{"level", smolyak_level}};
  j["warm_start"] = warm_start;
  auto& pr = j["probes"] = json::array();
  for (const auto& p : probes)
    pr.push_back({{"x", p.point.x}, {"y", p.point.y}, {"field", to_string(p.field)}, {"samples", p.samples}});
  j["out"] = out;
  j["seed"] = seed;
  return j.dump(2);
}

ExperimentSetup setup_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentSetup s;
  MeshSpec ms;
  ms.geometry = cfg.geometry;
  ms.nx = cfg.nx;
  ms.ny = cfg.ny;
  ms.obstacle = cfg.obstacle;
  try {
    s.mesh = std::make_shared<const Mesh>(build_mesh(ms));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  s.bc = default_boundary_data(cfg.geometry);
  const LognormalParameters lp = calibrate_sigma(cfg.cov, cfg.mean_viscosity());
  CovarianceSpec cov = cfg.correlation;
  cov.sigma_g = lp.sigma_g;
  s.kl = discrete_kl(cov, *s.mesh, cfg.N, lp.g0);
  s.viscosity = lognormal_gpc_coeffs(s.kl, total_degree_indices(cfg.N, cfg.coefficient_degree()));
  s.viscosity.cov = cfg.cov;
  s.viscosity.mean = cfg.mean_viscosity();
  return s;
}

}  // namespace sgns
