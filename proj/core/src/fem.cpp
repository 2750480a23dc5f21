#include "sgns/fem.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace sgns {

double asymmetry(const SparseMatrix& a) {
  const SparseMatrix t = a.transpose();
  const SparseMatrix d = a - t;
  double m = 0.0;
  for (int k = 0; k < d.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(d, k); it; ++it) m = std::max(m, std::abs(it.value()));
  return m;
}

namespace {

constexpr int kQuad = 3;
constexpr int kPoints = kQuad * kQuad;

struct Quadrature1D {
  std::array<double, kQuad> x{-std::sqrt(0.6), 0.0, std::sqrt(0.6)};
  std::array<double, kQuad> w{5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
};

double quad1(int a, double s) {
  switch (a) {
    case 0: return 0.5 * s * (s - 1.0);
    case 1: return 1.0 - s * s;
    default: return 0.5 * s * (s + 1.0);
  }
}
double dquad1(int a, double s) {
  switch (a) {
    case 0: return s - 0.5;
    case 1: return -2.0 * s;
    default: return s + 0.5;
  }
}
double lin1(int a, double s) { return a == 0 ? 0.5 * (1.0 - s) : 0.5 * (1.0 + s); }
double dlin1(int a, double) { return a == 0 ? -0.5 : 0.5; }

/// Reference-element tables at the 3x3 Gauss points.
struct ReferenceTables {
  std::array<double, kPoints> weight{};
  std::array<std::array<double, 9>, kPoints> q2{};
  std::array<std::array<double, 9>, kPoints> q2_ds{};
  std::array<std::array<double, 9>, kPoints> q2_dt{};
  std::array<std::array<double, 4>, kPoints> q1{};
  std::array<std::array<double, 4>, kPoints> q1_ds{};
  std::array<std::array<double, 4>, kPoints> q1_dt{};

  ReferenceTables() {
    const Quadrature1D g;
    for (int qj = 0; qj < kQuad; ++qj) {
      for (int qi = 0; qi < kQuad; ++qi) {
        const int q = qj * kQuad + qi;
        const double s = g.x[qi], t = g.x[qj];
        weight[q] = g.w[qi] * g.w[qj];
        for (int b = 0; b < 3; ++b) {
          for (int a = 0; a < 3; ++a) {
            q2[q][3 * b + a] = quad1(a, s) * quad1(b, t);
            q2_ds[q][3 * b + a] = dquad1(a, s) * quad1(b, t);
            q2_dt[q][3 * b + a] = quad1(a, s) * dquad1(b, t);
          }
        }
        for (int b = 0; b < 2; ++b) {
          for (int a = 0; a < 2; ++a) {
            q1[q][2 * b + a] = lin1(a, s) * lin1(b, t);
            q1_ds[q][2 * b + a] = dlin1(a, s) * lin1(b, t);
            q1_dt[q][2 * b + a] = lin1(a, s) * dlin1(b, t);
          }
        }
      }
    }
  }
};

const ReferenceTables& tables() {
  static const ReferenceTables t;
  return t;
}

/// Physical quantities of one element at the quadrature points (bilinear geometry map).
struct ElementData {
  std::array<double, kPoints> jxw{};
  std::array<std::array<double, 9>, kPoints> dx{}, dy{};
  std::array<std::array<double, 4>, kPoints> pdx{}, pdy{};
};

void element_data(const Mesh& mesh, int e, ElementData& out) {
  const auto& t = tables();
  const auto& conn = mesh.elements[e];
  const std::array<Point, 4> c{mesh.nodes[conn[0]], mesh.nodes[conn[2]], mesh.nodes[conn[6]], mesh.nodes[conn[8]]};
  for (int q = 0; q < kPoints; ++q) {
    double xs = 0, xt = 0, ys = 0, yt = 0;
    for (int k = 0; k < 4; ++k) {
      xs += t.q1_ds[q][k] * c[k].x;
      xt += t.q1_dt[q][k] * c[k].x;
      ys += t.q1_ds[q][k] * c[k].y;
      yt += t.q1_dt[q][k] * c[k].y;
    }
    const double det = xs * yt - xt * ys;
    if (!(det > 1e-14)) throw std::invalid_argument("degenerate element " + std::to_string(e) + " (non-positive Jacobian)");
    out.jxw[q] = det * t.weight[q];
    const double inv = 1.0 / det;
    for (int a = 0; a < 9; ++a) {
      out.dx[q][a] = inv * (yt * t.q2_ds[q][a] - ys * t.q2_dt[q][a]);
      out.dy[q][a] = inv * (-xt * t.q2_ds[q][a] + xs * t.q2_dt[q][a]);
    }
    for (int a = 0; a < 4; ++a) {
      out.pdx[q][a] = inv * (yt * t.q1_ds[q][a] - ys * t.q1_dt[q][a]);
      out.pdy[q][a] = inv * (-xt * t.q1_ds[q][a] + xs * t.q1_dt[q][a]);
    }
  }
}

void require_size(Eigen::Index got, Eigen::Index want, const char* what) {
  if (got != want)
    throw std::invalid_argument(std::string(what) + ": expected length " + std::to_string(want) + ", got " +
                                std::to_string(got));
}

SparseMatrix from_triplets(int rows, int cols, const std::vector<Triplet>& t) {
  SparseMatrix m(rows, cols);
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

}  // namespace

SparseMatrix assemble_weighted_laplacian(const Mesh& mesh, const NodalField& coeff) {
  const int nv = mesh.num_velocity_nodes();
  require_size(coeff.size(), nv, "assemble_weighted_laplacian");
  const auto& t = tables();
  std::vector<Triplet> trip;
  trip.reserve(static_cast<std::size_t>(mesh.num_elements()) * 162);
  ElementData ed;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    element_data(mesh, e, ed);
    const auto& conn = mesh.elements[e];
    double local[9][9] = {};
    for (int q = 0; q < kPoints; ++q) {
      double c = 0.0;
      for (int n = 0; n < 9; ++n) c += coeff[conn[n]] * t.q2[q][n];
      const double w = c * ed.jxw[q];
      for (int a = 0; a < 9; ++a)
        for (int b = 0; b < 9; ++b) local[a][b] += w * (ed.dx[q][a] * ed.dx[q][b] + ed.dy[q][a] * ed.dy[q][b]);
    }
    for (int a = 0; a < 9; ++a) {
      for (int b = 0; b < 9; ++b) {
        trip.emplace_back(conn[a], conn[b], local[a][b]);
        trip.emplace_back(nv + conn[a], nv + conn[b], local[a][b]);
      }
    }
  }
  return from_triplets(2 * nv, 2 * nv, trip);
}

SparseMatrix assemble_divergence(const Mesh& mesh) {
  const int nv = mesh.num_velocity_nodes();
  const auto& t = tables();
  std::vector<Triplet> trip;
  trip.reserve(static_cast<std::size_t>(mesh.num_elements()) * 72);
  ElementData ed;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    element_data(mesh, e, ed);
    const auto& conn = mesh.elements[e];
    const auto& pconn = mesh.pressure_elements[e];
    double bx[4][9] = {}, by[4][9] = {};
    for (int q = 0; q < kPoints; ++q) {
      for (int i = 0; i < 4; ++i) {
        const double w = t.q1[q][i] * ed.jxw[q];
        for (int b = 0; b < 9; ++b) {
          bx[i][b] -= w * ed.dx[q][b];
          by[i][b] -= w * ed.dy[q][b];
        }
      }
    }
    for (int i = 0; i < 4; ++i) {
      for (int b = 0; b < 9; ++b) {
        trip.emplace_back(pconn[i], conn[b], bx[i][b]);
        trip.emplace_back(pconn[i], nv + conn[b], by[i][b]);
      }
    }
  }
  return from_triplets(mesh.n_p(), 2 * nv, trip);
}

SparseMatrix assemble_convection(const Mesh& mesh, const Vector& wind) {
  const int nv = mesh.num_velocity_nodes();
  require_size(wind.size(), 2 * nv, "assemble_convection");
  const auto& t = tables();
  std::vector<Triplet> trip;
  trip.reserve(static_cast<std::size_t>(mesh.num_elements()) * 162);
  ElementData ed;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    element_data(mesh, e, ed);
    const auto& conn = mesh.elements[e];
    double local[9][9] = {};
    for (int q = 0; q < kPoints; ++q) {
      double wx = 0.0, wy = 0.0;
      for (int n = 0; n < 9; ++n) {
        wx += wind[conn[n]] * t.q2[q][n];
        wy += wind[nv + conn[n]] * t.q2[q][n];
      }
      for (int b = 0; b < 9; ++b) {
        const double adv = (wx * ed.dx[q][b] + wy * ed.dy[q][b]) * ed.jxw[q];
        for (int a = 0; a < 9; ++a) local[a][b] += adv * t.q2[q][a];
      }
    }
    for (int a = 0; a < 9; ++a) {
      for (int b = 0; b < 9; ++b) {
        trip.emplace_back(conn[a], conn[b], local[a][b]);
        trip.emplace_back(nv + conn[a], nv + conn[b], local[a][b]);
      }
    }
  }
  return from_triplets(2 * nv, 2 * nv, trip);
}

SparseMatrix assemble_newton_derivative(const Mesh& mesh, const Vector& state) {
  const int nv = mesh.num_velocity_nodes();
  require_size(state.size(), 2 * nv, "assemble_newton_derivative");
  const auto& t = tables();
  std::vector<Triplet> trip;
  trip.reserve(static_cast<std::size_t>(mesh.num_elements()) * 324);
  ElementData ed;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    element_data(mesh, e, ed);
    const auto& conn = mesh.elements[e];
    // blocks[ca][cb](a, b) = int phi_a phi_b d_cb u_ca
    double blocks[2][2][9][9] = {};
    for (int q = 0; q < kPoints; ++q) {
      double grad[2][2] = {};  // grad[c][d] = d_d u_c
      for (int n = 0; n < 9; ++n) {
        const double ux = state[conn[n]], uy = state[nv + conn[n]];
        grad[0][0] += ux * ed.dx[q][n];
        grad[0][1] += ux * ed.dy[q][n];
        grad[1][0] += uy * ed.dx[q][n];
        grad[1][1] += uy * ed.dy[q][n];
      }
      for (int a = 0; a < 9; ++a) {
        for (int b = 0; b < 9; ++b) {
          const double m = t.q2[q][a] * t.q2[q][b] * ed.jxw[q];
          for (int ca = 0; ca < 2; ++ca)
            for (int cb = 0; cb < 2; ++cb) blocks[ca][cb][a][b] += m * grad[ca][cb];
        }
      }
    }
    for (int ca = 0; ca < 2; ++ca)
      for (int cb = 0; cb < 2; ++cb)
        for (int a = 0; a < 9; ++a)
          for (int b = 0; b < 9; ++b) trip.emplace_back(ca * nv + conn[a], cb * nv + conn[b], blocks[ca][cb][a][b]);
  }
  return from_triplets(2 * nv, 2 * nv, trip);
}

double integrate(const Mesh& mesh, const NodalField& f) {
  require_size(f.size(), mesh.num_velocity_nodes(), "integrate");
  const auto& t = tables();
  ElementData ed;
  double total = 0.0;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    element_data(mesh, e, ed);
    const auto& conn = mesh.elements[e];
    for (int q = 0; q < kPoints; ++q) {
      double v = 0.0;
      for (int n = 0; n < 9; ++n) v += f[conn[n]] * t.q2[q][n];
      total += v * ed.jxw[q];
    }
  }
  return total;
}

SparseMatrix constrain_symmetric(const SparseMatrix& a, const std::vector<bool>& mask, double diag) {
  std::vector<Triplet> trip;
  trip.reserve(static_cast<std::size_t>(a.nonZeros()));
  for (int r = 0; r < a.outerSize(); ++r) {
    if (mask[r]) {
      if (diag != 0.0) trip.emplace_back(r, r, diag);
      continue;
    }
    for (SparseMatrix::InnerIterator it(a, r); it; ++it)
      if (!mask[it.col()]) trip.emplace_back(r, it.col(), it.value());
  }
  return from_triplets(static_cast<int>(a.rows()), static_cast<int>(a.cols()), trip);
}

SparseMatrix zero_columns(const SparseMatrix& a, const std::vector<bool>& mask) {
  std::vector<Triplet> trip;
  trip.reserve(static_cast<std::size_t>(a.nonZeros()));
  for (int r = 0; r < a.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(a, r); it; ++it)
      if (!mask[it.col()]) trip.emplace_back(r, it.col(), it.value());
  return from_triplets(static_cast<int>(a.rows()), static_cast<int>(a.cols()), trip);
}

SparseMatrix zero_rows(const SparseMatrix& a, const std::vector<bool>& mask) {
  std::vector<Triplet> trip;
  trip.reserve(static_cast<std::size_t>(a.nonZeros()));
  for (int r = 0; r < a.outerSize(); ++r) {
    if (mask[r]) continue;
    for (SparseMatrix::InnerIterator it(a, r); it; ++it) trip.emplace_back(r, it.col(), it.value());
  }
  return from_triplets(static_cast<int>(a.rows()), static_cast<int>(a.cols()), trip);
}

SparseMatrix assemble_saddle(const SparseMatrix& F, const SparseMatrix& B, const SparseMatrix& C) {
  const int nu = static_cast<int>(F.rows());
  const int np = static_cast<int>(B.rows());
  std::vector<Triplet> trip;
  trip.reserve(static_cast<std::size_t>(F.nonZeros() + 2 * B.nonZeros() + C.nonZeros()));
  for (int r = 0; r < F.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(F, r); it; ++it) trip.emplace_back(r, it.col(), it.value());
  for (int r = 0; r < B.outerSize(); ++r) {
    for (SparseMatrix::InnerIterator it(B, r); it; ++it) {
      trip.emplace_back(nu + r, it.col(), it.value());
      trip.emplace_back(it.col(), nu + r, it.value());
    }
  }
  if (C.nonZeros() > 0)
    for (int r = 0; r < C.outerSize(); ++r)
      for (SparseMatrix::InnerIterator it(C, r); it; ++it) trip.emplace_back(nu + r, nu + it.col(), it.value());
  return from_triplets(nu + np, nu + np, trip);
}

SaddleBlocks apply_dirichlet(const SaddleBlocks& blocks, const Mesh& mesh, const BoundaryFunction& bc) {
  if (!bc) throw std::invalid_argument("apply_dirichlet: boundary data missing for Dirichlet nodes");
  const std::vector<double> gv = dirichlet_values(mesh, bc);
  const Vector g = Eigen::Map<const Vector>(gv.data(), static_cast<Eigen::Index>(gv.size()));
  const std::vector<bool> mask = dirichlet_dof_mask(mesh);
  const int nu = mesh.n_u(), np = mesh.n_p();

  Vector gd = Vector::Zero(nu);
  for (int i = 0; i < nu; ++i)
    if (mask[i]) gd[i] = g[i];

  SaddleBlocks out;
  out.rhs_u = blocks.rhs_u.size() ? blocks.rhs_u : Vector::Zero(nu);
  out.rhs_p = blocks.rhs_p.size() ? blocks.rhs_p : Vector::Zero(np);
  out.rhs_u -= blocks.F * gd;
  out.rhs_p -= blocks.B * gd;
  for (int i = 0; i < nu; ++i)
    if (mask[i]) out.rhs_u[i] = g[i];
  out.F = constrain_symmetric(blocks.F, mask, 1.0);
  out.B = zero_columns(blocks.B, mask);
  out.C = SparseMatrix(np, np);
  if (mesh.enclosed()) {
    std::vector<bool> pin(static_cast<std::size_t>(np), false);
    pin[0] = true;
    out.B = zero_rows(out.B, pin);
    out.rhs_p[0] = 0.0;
    out.C.insert(0, 0) = 1.0;
    out.C.makeCompressed();
  }
  return out;
}

PcdOperators assemble_pcd_operators(const Mesh& mesh, const NodalField& mean_visc, const Vector& wind) {
  const int nv = mesh.num_velocity_nodes();
  const int np = mesh.n_p();
  require_size(mean_visc.size(), nv, "assemble_pcd_operators(viscosity)");
  require_size(wind.size(), 2 * nv, "assemble_pcd_operators(wind)");
  const auto& t = tables();
  std::vector<Triplet> ta, tf, tm;
  ElementData ed;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    element_data(mesh, e, ed);
    const auto& conn = mesh.elements[e];
    const auto& pconn = mesh.pressure_elements[e];
    double la[4][4] = {}, lf[4][4] = {}, lm[4][4] = {};
    for (int q = 0; q < kPoints; ++q) {
      double nu = 0.0, wx = 0.0, wy = 0.0;
      for (int n = 0; n < 9; ++n) {
        nu += mean_visc[conn[n]] * t.q2[q][n];
        wx += wind[conn[n]] * t.q2[q][n];
        wy += wind[nv + conn[n]] * t.q2[q][n];
      }
      const double w = ed.jxw[q];
      for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
          const double lap = ed.pdx[q][i] * ed.pdx[q][j] + ed.pdy[q][i] * ed.pdy[q][j];
          la[i][j] += w * lap;
          lf[i][j] += w * (nu * lap + (wx * ed.pdx[q][j] + wy * ed.pdy[q][j]) * t.q1[q][i]);
          lm[i][j] += w * t.q1[q][i] * t.q1[q][j];
        }
      }
    }
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        ta.emplace_back(pconn[i], pconn[j], la[i][j]);
        tf.emplace_back(pconn[i], pconn[j], lf[i][j]);
        tm.emplace_back(pconn[i], pconn[j], lm[i][j]);
      }
    }
  }

  PcdOperators out;
  out.dirichlet_rows.assign(static_cast<std::size_t>(np), false);
  // Corners shared with walls count as inflow here even though the velocity tag says wall.
  std::vector<bool> on_inflow(static_cast<std::size_t>(nv), false);
  for (const auto& edge : mesh.boundary)
    if (edge.tag == BoundaryTag::DirichletInflow)
      for (int n : edge.nodes) on_inflow[n] = true;
  for (int p = 0; p < np; ++p) out.dirichlet_rows[p] = on_inflow[mesh.pressure_nodes[p]];
  auto with_identity_rows = [&](std::vector<Triplet>& trip) {
    std::vector<Triplet> kept;
    kept.reserve(trip.size());
    for (const auto& tr : trip)
      if (!out.dirichlet_rows[tr.row()]) kept.push_back(tr);
    for (int p = 0; p < np; ++p)
      if (out.dirichlet_rows[p]) kept.emplace_back(p, p, 1.0);
    return from_triplets(np, np, kept);
  };
  out.Ap = with_identity_rows(ta);
  out.Fp = with_identity_rows(tf);
  out.Mp = from_triplets(np, np, tm);
  return out;
}

}  // namespace sgns
