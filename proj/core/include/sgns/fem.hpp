#pragma once

#include <vector>

#include "sgns/mesh.hpp"
#include "sgns/sparse.hpp"

namespace sgns {

/// Spatial function sampled at the velocity (Q2) nodes.
using NodalField = Vector;

// All integrals use 3x3 tensor Gauss quadrature per element; nodal coefficients are
// interpolated through the Q2 basis.

/// N_u x N_u, entries  int coeff grad(phi_b) : grad(phi_a). Block diagonal in the two components.
SparseMatrix assemble_weighted_laplacian(const Mesh& mesh, const NodalField& coeff);

/// N_p x N_u, entries  -int q_c div(phi_d).  With this sign the pressure term of the momentum
/// equation, -int p div(v), is B^T p and the Stokes matrix [A B^T; B 0] is symmetric.
SparseMatrix assemble_divergence(const Mesh& mesh);

/// N_u x N_u, entries  int (w . grad phi_b) . phi_a  for a velocity coefficient vector w.
SparseMatrix assemble_convection(const Mesh& mesh, const Vector& wind);

/// N_u x N_u, entries  int (phi_b . grad u) . phi_a  (Newton derivative of the convection term).
SparseMatrix assemble_newton_derivative(const Mesh& mesh, const Vector& state);

/// Integral of the Q2 interpolant of a nodal field.
double integrate(const Mesh& mesh, const NodalField& f);

/// Linear saddle-point system [F B^T; B C] (u, p) = (rhs_u, rhs_p).
/// C is empty (zero) unless a pressure dof has been pinned.
struct SaddleBlocks {
  SparseMatrix F;
  SparseMatrix B;
  SparseMatrix C;
  Vector rhs_u;
  Vector rhs_p;
};

/// Symmetric elimination of the Dirichlet velocity dofs: rows and columns are zeroed, the
/// diagonal set to one, and the lifting  -F[:, D] g, -B[:, D] g  moved to the right-hand side
/// (rhs_u[D] = g). For enclosed meshes pressure dof 0 is pinned to zero in the same way.
/// Throws std::invalid_argument if bc is empty.
SaddleBlocks apply_dirichlet(const SaddleBlocks& blocks, const Mesh& mesh, const BoundaryFunction& bc);

/// Zero rows and columns flagged in mask and put diag on the diagonal of those rows.
SparseMatrix constrain_symmetric(const SparseMatrix& a, const std::vector<bool>& mask, double diag);
/// Zero the columns flagged in mask.
SparseMatrix zero_columns(const SparseMatrix& a, const std::vector<bool>& mask);
/// Zero the rows flagged in mask.
SparseMatrix zero_rows(const SparseMatrix& a, const std::vector<bool>& mask);

/// Assemble [F B^T; B C] as one (N_u + N_p) square matrix.
SparseMatrix assemble_saddle(const SparseMatrix& F, const SparseMatrix& B, const SparseMatrix& C);

/// Pressure convection-diffusion operators on the Q1 space.
///
/// Ap is the pressure Laplacian, Fp = int nu grad q_j . grad q_i + (w . grad q_j) q_i, Mp the
/// pressure mass matrix. Ap and Fp have identity rows at pressure nodes on the inflow
/// boundary (the only Dirichlet condition of the PCD construction); Mp is unmodified.
struct PcdOperators {
  SparseMatrix Ap;
  SparseMatrix Fp;
  SparseMatrix Mp;
  std::vector<bool> dirichlet_rows;
};

PcdOperators assemble_pcd_operators(const Mesh& mesh, const NodalField& mean_visc, const Vector& wind);

}  // namespace sgns
