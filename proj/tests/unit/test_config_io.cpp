#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "fixtures.hpp"
#include "json.hpp"
#include "sgns/config.hpp"
#include "sgns/io.hpp"

using namespace sgns;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto d = fs::temp_directory_path() / ("sgns_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST(Config, Defaults) {
  const auto c = parse_config("{}");
  EXPECT_EQ(c.geometry, Geometry::Channel);
  EXPECT_EQ(c.nx, 96);
  EXPECT_EQ(c.ny, 16);
  ASSERT_TRUE(c.obstacle.has_value());
  EXPECT_EQ(c.N, 2);
  EXPECT_EQ(c.P, 3);
  EXPECT_EQ(c.coefficient_degree(), 6);
  EXPECT_DOUBLE_EQ(c.mean_viscosity(), 0.02);
  EXPECT_EQ(c.nonlinear.n_picard, 6);
  EXPECT_EQ(c.nonlinear.max_newton, 10);
  EXPECT_DOUBLE_EQ(c.nonlinear.tol, 1e-8);
  EXPECT_EQ(c.mc_samples, 1000);
  EXPECT_EQ(c.smolyak_level, 4);
  EXPECT_EQ(c.method, Method::Galerkin);
}

TEST(Config, ParsesAllSections) {
  const auto c = parse_config(R"({
    "geometry": "cavity", "nx": 8, "ny": 10, "re0": 300, "cov": 0.3, "N": 4, "P": 2,
    "correlation": {"Lx": 0.5, "Ly": 0.25}, "method": "collocation",
    "preconditioner": {"kind": "ahgs-pcd-it", "l_t": 2, "inner_iters": 5},
    "fgmres": {"tol": 1e-6, "max_iter": 50, "restart": 10},
    "nonlinear": {"max_newton": 3, "inexact_picard": true},
    "mc": {"samples": 20}, "collocation": {"level": 3}, "warm_start": false,
    "probes": [{"x": 0.1, "y": -0.2, "field": "uy", "samples": 500}],
    "out": "o", "seed": 18446744073709551615})");
  EXPECT_EQ(c.geometry, Geometry::Cavity);
  EXPECT_FALSE(c.obstacle.has_value());
  EXPECT_EQ(c.nonlinear.n_picard, 20);
  EXPECT_EQ(c.nonlinear.max_newton, 3);
  EXPECT_TRUE(c.nonlinear.inexact_picard);
  EXPECT_EQ(c.precond.kind, PrecondKind::AHGS_PCD_IT);
  EXPECT_EQ(c.nonlinear.linear.precond.l_t, 2);
  EXPECT_EQ(c.nonlinear.linear.fgmres.restart, 10);
  EXPECT_EQ(c.method, Method::Collocation);
  ASSERT_EQ(c.probes.size(), 1u);
  EXPECT_EQ(c.probes[0].field, ProbeField::Uy);
  EXPECT_EQ(c.seed, 18446744073709551615ull);
  EXPECT_DOUBLE_EQ(c.correlation.Ly, 0.25);
}

TEST(Config, RoundTrip) {
  auto c = parse_config(R"({"nx": 48, "ny": 8, "cov": 0.2, "obstacle": [1.5, 2.5, -0.5, 0.5],
                            "probes": [{"x": 4.01, "y": 0.4339}]})");
  const auto d = parse_config(c.to_json());
  EXPECT_EQ(d.to_json(), c.to_json());
  EXPECT_DOUBLE_EQ(d.obstacle->x0, 1.5);
  const auto j = nlohmann::json::parse(c.to_json());
  EXPECT_EQ(j["nx"], 48);
}

TEST(Config, Rejections) {
  EXPECT_THROW(parse_config("{"), ConfigError);
  EXPECT_THROW(parse_config(R"({"Nx": 4})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"fgmres": {"tolerance": 1}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"geometry": "pipe"})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"nx": 1})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"cov": -0.1})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"P": 2, "preconditioner": {"l_t": 5}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"method": "qmc"})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"preconditioner": {"kind": "ilu"}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"nx": "many"})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"geometry": "cavity", "obstacle": true})"), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/config.json"), IoError);
}

TEST(Config, LoadFromFile) {
  const auto d = scratch("config");
  write_text((d / "c.json").string(), R"({"nx": 12, "ny": 4, "obstacle": false})");
  const auto c = load_config((d / "c.json").string());
  EXPECT_EQ(c.nx, 12);
  EXPECT_FALSE(c.obstacle.has_value());
  fs::remove_all(d);
}

TEST(Setup, MeshAndViscosity) {
  const auto s = setup_experiment(fixture::cavity_config(4, 0.1, 2, 1));
  EXPECT_EQ(s.mesh->num_velocity_nodes(), 81);
  EXPECT_EQ(s.viscosity.size(), 6);
  EXPECT_NEAR(s.viscosity.mean, 0.02, 1e-15);
  EXPECT_DOUBLE_EQ(s.viscosity.cov, 0.1);
}

TEST(Export, PressureToNodesIsBilinear) {
  const auto s = setup_experiment(fixture::cavity_config(4, 0.0, 1, 1));
  const Mesh& m = *s.mesh;
  Vector p(m.n_p());
  for (int i = 0; i < m.n_p(); ++i) {
    const Point q = m.nodes[m.pressure_nodes[i]];
    p[i] = 1.0 + 2.0 * q.x - q.y + 0.5 * q.x * q.y;
  }
  const Vector at = pressure_to_nodes(m, p);
  for (int n = 0; n < m.num_velocity_nodes(); ++n) {
    const Point q = m.nodes[n];
    EXPECT_NEAR(at[n], 1.0 + 2.0 * q.x - q.y + 0.5 * q.x * q.y, 1e-13);
  }
  EXPECT_THROW(pressure_to_nodes(m, Vector::Zero(3)), std::invalid_argument);
}

TEST(Export, VtkAndCsv) {
  const auto d = scratch("export");
  const auto s = setup_experiment(fixture::cavity_config(2, 0.0, 1, 1));
  const Mesh& m = *s.mesh;
  const int nv = m.num_velocity_nodes();
  const std::vector<NamedField> fields{{"nu", s.viscosity.coeffs[0]}, {"zero", Vector::Zero(nv)}};
  write_vtk((d / "f.vtk").string(), m, fields);
  const std::string vtk = read_text((d / "f.vtk").string());
  EXPECT_EQ(vtk.rfind("# vtk DataFile Version", 0), 0u);
  EXPECT_NE(vtk.find("POINTS " + std::to_string(nv)), std::string::npos);
  EXPECT_NE(vtk.find("CELLS " + std::to_string(m.num_elements())), std::string::npos);
  EXPECT_NE(vtk.find("SCALARS nu"), std::string::npos);
  write_nodal_csv((d / "f.csv").string(), m, fields);
  const std::string csv = read_text((d / "f.csv").string());
  EXPECT_EQ(csv.rfind("x,y,nu,zero\n", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), nv + 1);
  EXPECT_THROW(write_vtk((d / "f.vtk").string(), m, {{"bad", Vector::Zero(3)}}), std::invalid_argument);
  // A regular file cannot act as a parent directory.
  EXPECT_THROW(write_text((d / "f.csv" / "g.txt").string(), "x"), IoError);
  EXPECT_THROW(read_text((d / "missing.txt").string()), IoError);
  fs::remove_all(d);
}
