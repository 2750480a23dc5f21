#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace sgns {

enum class Geometry { Channel, Cavity };

/// Every boundary edge carries exactly one tag. DirichletInflow edges carry
/// prescribed (generally nonzero) velocity data: the channel inlet or the cavity lid.
enum class BoundaryTag : std::uint8_t { DirichletInflow, DirichletWall, NeumannOutflow };

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct Rect {
  double x0, x1, y0, y1;
};

struct MeshSpec {
  Geometry geometry = Geometry::Channel;
  int nx = 96;
  int ny = 16;
  /// Channel only. Snapped to the nearest grid lines; must stay strictly interior.
  std::optional<Rect> obstacle;
};

/// Obstacle used for the flow-around-an-obstacle benchmark, [7/4, 9/4] x [-1/4, 1/4].
Rect default_obstacle();

struct BoundaryEdge {
  std::array<int, 3> nodes;  // endpoint, midpoint, endpoint (velocity node ids)
  BoundaryTag tag;
};

/// Structured Taylor-Hood (Q2-Q1) mesh of axis-aligned rectangles.
///
/// Velocity nodes live on a (2 nx + 1) x (2 ny + 1) lattice, pressure nodes on the
/// (nx + 1) x (ny + 1) vertex lattice; cells removed by an obstacle drop any node that
/// no longer belongs to an element. Velocity dofs are ordered [all u_x, all u_y], so
/// N_u = 2 * number of velocity nodes.
struct Mesh {
  Geometry geometry = Geometry::Channel;
  Rect domain{};
  int nx = 0;
  int ny = 0;

  std::vector<Point> nodes;
  /// Lattice coordinates (i, j) of each velocity node on the refined lattice.
  std::vector<std::array<int, 2>> lattice;
  /// Local order is tensor (a, b) -> 3 b + a, a along x.
  std::vector<std::array<int, 9>> elements;
  /// Local order is tensor (a, b) -> 2 b + a; entries index pressure dofs.
  std::vector<std::array<int, 4>> pressure_elements;
  std::vector<int> pressure_nodes;  // pressure dof -> velocity node id of that vertex
  std::vector<BoundaryEdge> boundary;
  /// Cell (ci, cj) -> element id at ci * ny + cj, or -1 for removed cells.
  std::vector<int> cell_element;

  /// Per velocity node: Dirichlet tag if the node lies on any Dirichlet edge.
  std::vector<std::optional<BoundaryTag>> dirichlet;

  int num_velocity_nodes() const { return static_cast<int>(nodes.size()); }
  int num_elements() const { return static_cast<int>(elements.size()); }
  int n_u() const { return 2 * num_velocity_nodes(); }
  int n_p() const { return static_cast<int>(pressure_nodes.size()); }
  /// True when no Neumann boundary exists, so pressure is fixed only up to a constant.
  bool enclosed() const;
  double area() const;
  /// Index of the element containing p, or -1.
  int locate(Point p) const;
};

Mesh build_mesh(const MeshSpec& spec);

/// Prescribed velocity at a Dirichlet node.
using BoundaryFunction = std::function<std::array<double, 2>(Point, BoundaryTag)>;

/// Channel: u = (1 - y^2, 0) on the inlet, zero on walls and obstacle.
/// Cavity: regularized lid u = (1 - x^4, 0), zero on the other walls.
BoundaryFunction default_boundary_data(Geometry geometry);

/// Velocity dof vector (length N_u) with Dirichlet values set and zeros elsewhere.
std::vector<double> dirichlet_values(const Mesh& mesh, const BoundaryFunction& bc);

/// Mask over velocity dofs (length N_u): true where the dof is Dirichlet-constrained.
std::vector<bool> dirichlet_dof_mask(const Mesh& mesh);

}  // namespace sgns
