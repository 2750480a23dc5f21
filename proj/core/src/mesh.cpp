#include "sgns/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sgns {

Rect default_obstacle() { return {1.75, 2.25, -0.25, 0.25}; }

bool Mesh::enclosed() const {
  for (const auto& e : boundary)
    if (e.tag == BoundaryTag::NeumannOutflow) return false;
  return true;
}

double Mesh::area() const {
  const double hx = (domain.x1 - domain.x0) / nx;
  const double hy = (domain.y1 - domain.y0) / ny;
  return hx * hy * num_elements();
}

int Mesh::locate(Point p) const {
  const double hx = (domain.x1 - domain.x0) / nx;
  const double hy = (domain.y1 - domain.y0) / ny;
  const double eps = 1e-12;
  if (p.x < domain.x0 - eps || p.x > domain.x1 + eps || p.y < domain.y0 - eps || p.y > domain.y1 + eps)
    return -1;
  int ci = static_cast<int>(std::floor((p.x - domain.x0) / hx));
  int cj = static_cast<int>(std::floor((p.y - domain.y0) / hy));
  ci = std::clamp(ci, 0, nx - 1);
  cj = std::clamp(cj, 0, ny - 1);
  if (int e = cell_element[ci * ny + cj]; e >= 0) return e;
  // On a cell edge shared with a removed cell: try the neighbours the point touches.
  for (int di = -1; di <= 1; ++di) {
    for (int dj = -1; dj <= 1; ++dj) {
      const int i = ci + di, j = cj + dj;
      if (i < 0 || j < 0 || i >= nx || j >= ny) continue;
      const int e = cell_element[i * ny + j];
      if (e < 0) continue;
      const double cx0 = domain.x0 + i * hx, cy0 = domain.y0 + j * hy;
      if (p.x >= cx0 - eps && p.x <= cx0 + hx + eps && p.y >= cy0 - eps && p.y <= cy0 + hy + eps) return e;
    }
  }
  return -1;
}

namespace {

struct CellRange {
  int i0, i1, j0, j1;  // half-open
};

CellRange snap_obstacle(const Rect& obstacle, const Rect& domain, int nx, int ny) {
  const double hx = (domain.x1 - domain.x0) / nx;
  const double hy = (domain.y1 - domain.y0) / ny;
  CellRange r{static_cast<int>(std::lround((obstacle.x0 - domain.x0) / hx)),
              static_cast<int>(std::lround((obstacle.x1 - domain.x0) / hx)),
              static_cast<int>(std::lround((obstacle.y0 - domain.y0) / hy)),
              static_cast<int>(std::lround((obstacle.y1 - domain.y0) / hy))};
  if (!(r.i0 > 0 && r.i0 < r.i1 && r.i1 < nx && r.j0 > 0 && r.j0 < r.j1 && r.j1 < ny))
    throw std::invalid_argument("build_mesh: obstacle must lie strictly inside the domain and cover at least one cell");
  return r;
}

}  // namespace

Mesh build_mesh(const MeshSpec& spec) {
  if (spec.nx < 2 || spec.ny < 2) throw std::invalid_argument("build_mesh: nx and ny must be >= 2");

  Mesh mesh;
  mesh.geometry = spec.geometry;
  mesh.nx = spec.nx;
  mesh.ny = spec.ny;
  mesh.domain = spec.geometry == Geometry::Channel ? Rect{0.0, 12.0, -1.0, 1.0} : Rect{-1.0, 1.0, -1.0, 1.0};
  const Rect& d = mesh.domain;
  const int nx = spec.nx, ny = spec.ny;

  std::vector<bool> active(static_cast<std::size_t>(nx * ny), true);
  if (spec.obstacle) {
    if (spec.geometry != Geometry::Channel) throw std::invalid_argument("build_mesh: obstacles are only supported in the channel");
    const CellRange r = snap_obstacle(*spec.obstacle, d, nx, ny);
    for (int i = r.i0; i < r.i1; ++i)
      for (int j = r.j0; j < r.j1; ++j) active[i * ny + j] = false;
  }
  auto is_active = [&](int i, int j) { return i >= 0 && j >= 0 && i < nx && j < ny && active[i * ny + j]; };

  // Lattice nodes that touch an active cell.
  const int li = 2 * nx + 1, lj = 2 * ny + 1;
  std::vector<int> node_id(static_cast<std::size_t>(li * lj), -1);
  std::vector<bool> used(node_id.size(), false);
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j)
      if (is_active(i, j))
        for (int a = 0; a < 3; ++a)
          for (int b = 0; b < 3; ++b) used[(2 * i + a) * lj + (2 * j + b)] = true;

  const double hx = (d.x1 - d.x0) / (2.0 * nx);
  const double hy = (d.y1 - d.y0) / (2.0 * ny);
  std::vector<int> pressure_id(node_id.size(), -1);
  for (int I = 0; I < li; ++I) {
    for (int J = 0; J < lj; ++J) {
      const int k = I * lj + J;
      if (!used[k]) continue;
      node_id[k] = mesh.num_velocity_nodes();
      mesh.nodes.push_back({d.x0 + I * hx, d.y0 + J * hy});
      mesh.lattice.push_back({I, J});
      if (I % 2 == 0 && J % 2 == 0) {
        pressure_id[k] = mesh.n_p();
        mesh.pressure_nodes.push_back(node_id[k]);
      }
    }
  }

  mesh.cell_element.assign(static_cast<std::size_t>(nx * ny), -1);
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      if (!is_active(i, j)) continue;
      std::array<int, 9> q2{};
      std::array<int, 4> q1{};
      for (int b = 0; b < 3; ++b)
        for (int a = 0; a < 3; ++a) q2[3 * b + a] = node_id[(2 * i + a) * lj + (2 * j + b)];
      for (int b = 0; b < 2; ++b)
        for (int a = 0; a < 2; ++a) q1[2 * b + a] = pressure_id[(2 * i + 2 * a) * lj + (2 * j + 2 * b)];
      mesh.cell_element[i * ny + j] = mesh.num_elements();
      mesh.elements.push_back(q2);
      mesh.pressure_elements.push_back(q1);
    }
  }

  auto tag_for = [&](int side, int i, int j) {
    // side: 0 left, 1 right, 2 bottom, 3 top
    const bool outer_left = side == 0 && i == 0;
    const bool outer_right = side == 1 && i == nx - 1;
    const bool outer_top = side == 3 && j == ny - 1;
    if (spec.geometry == Geometry::Channel) {
      if (outer_left) return BoundaryTag::DirichletInflow;
      if (outer_right) return BoundaryTag::NeumannOutflow;
      return BoundaryTag::DirichletWall;
    }
    return outer_top ? BoundaryTag::DirichletInflow : BoundaryTag::DirichletWall;
  };

  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      if (!is_active(i, j)) continue;
      const auto& q2 = mesh.elements[mesh.cell_element[i * ny + j]];
      if (!is_active(i - 1, j)) mesh.boundary.push_back({{q2[0], q2[3], q2[6]}, tag_for(0, i, j)});
      if (!is_active(i + 1, j)) mesh.boundary.push_back({{q2[2], q2[5], q2[8]}, tag_for(1, i, j)});
      if (!is_active(i, j - 1)) mesh.boundary.push_back({{q2[0], q2[1], q2[2]}, tag_for(2, i, j)});
      if (!is_active(i, j + 1)) mesh.boundary.push_back({{q2[6], q2[7], q2[8]}, tag_for(3, i, j)});
    }
  }

  // Wall tags win at corners shared with inflow edges; both carry zero data there.
  mesh.dirichlet.assign(mesh.nodes.size(), std::nullopt);
  for (const auto& e : mesh.boundary) {
    if (e.tag == BoundaryTag::NeumannOutflow) continue;
    for (int n : e.nodes) {
      auto& t = mesh.dirichlet[n];
      if (!t || e.tag == BoundaryTag::DirichletWall) t = e.tag;
    }
  }
  return mesh;
}

BoundaryFunction default_boundary_data(Geometry geometry) {
  if (geometry == Geometry::Channel) {
    return [](Point p, BoundaryTag tag) -> std::array<double, 2> {
      if (tag == BoundaryTag::DirichletInflow) return {1.0 - p.y * p.y, 0.0};
      return {0.0, 0.0};
    };
  }
  return [](Point p, BoundaryTag tag) -> std::array<double, 2> {
    if (tag == BoundaryTag::DirichletInflow) return {1.0 - std::pow(p.x, 4), 0.0};
    return {0.0, 0.0};
  };
}

std::vector<double> dirichlet_values(const Mesh& mesh, const BoundaryFunction& bc) {
  const int nv = mesh.num_velocity_nodes();
  std::vector<double> g(static_cast<std::size_t>(2 * nv), 0.0);
  for (int n = 0; n < nv; ++n) {
    if (!mesh.dirichlet[n]) continue;
    const auto v = bc(mesh.nodes[n], *mesh.dirichlet[n]);
    g[n] = v[0];
    g[nv + n] = v[1];
  }
  return g;
}

std::vector<bool> dirichlet_dof_mask(const Mesh& mesh) {
  const int nv = mesh.num_velocity_nodes();
  std::vector<bool> mask(static_cast<std::size_t>(2 * nv), false);
  for (int n = 0; n < nv; ++n) {
    if (mesh.dirichlet[n]) {
      mask[n] = true;
      mask[nv + n] = true;
    }
  }
  return mask;
}

}  // namespace sgns
