#pragma once

#include <span>
#include <vector>

#include "sgns/fem.hpp"
#include "sgns/gpc.hpp"
#include "sgns/mesh.hpp"

namespace sgns {

/// Separable exponential covariance  sigma_g^2 exp(-|dx|/Lx - |dy|/Ly).
struct CovarianceSpec {
  double sigma_g = 0.0;
  double Lx = 3.0;
  double Ly = 0.5;
};

struct KLExpansion {
  NodalField g0;
  /// g_j = sqrt(lambda_j) v_j, ordered by nonincreasing eigenvalue.
  std::vector<NodalField> modes;
  std::vector<double> eigenvalues;
  /// Factor applied to every mode so that the domain average of sum_j g_j^2 equals sigma_g^2.
  double variance_scale = 1.0;
};

/// Discrete KL expansion on the velocity nodes.
///
/// The kernel is separable and the lumped Q2 mass of a full tensor lattice is a tensor product,
/// so the eigenproblem C W v = lambda v on the bounding lattice factors into two 1D problems.
/// Eigenpairs of the 2D problem are products of 1D pairs; the N largest are kept and restricted
/// to the nodes present in the mesh.
KLExpansion discrete_kl(const CovarianceSpec& cov, const Mesh& mesh, int N, double g0 = 0.0);

/// 1D building block: eigenpairs of the exponential kernel exp(-|s - t| / L) on the points of a
/// uniform Q2 lattice with lumped weights w. Eigenvectors are W-orthonormal, eigenvalues
/// nonincreasing.
struct KL1D {
  Vector eigenvalues;
  DenseMatrix eigenvectors;  // column j is v_j
};
KL1D exponential_kernel_eigen(const Vector& points, const Vector& weights, double L);

/// Lumped (row-sum) Q2 mass weights of a uniform 1D lattice with n_cells elements of size h.
Vector lumped_q2_weights_1d(int n_cells, double h);

struct LognormalParameters {
  double sigma_g = 0.0;
  double g0 = 0.0;
};

/// sigma_g = sqrt(ln(1 + CoV^2)) and g0 = ln(mean) - sigma_g^2 / 2, so that exp(g0 + sigma_g^2/2)
/// is the requested mean viscosity. Throws std::invalid_argument unless 0 <= CoV < 1 and mean > 0.
LognormalParameters calibrate_sigma(double cov, double mean_viscosity);

enum class ShiftedMoment { Quadrature, ClosedForm };

struct StochasticViscosity {
  MultiIndexSet basis;  // degree 2P
  std::vector<NodalField> coeffs;
  double cov = 0.0;
  double mean = 0.0;

  int size() const { return static_cast<int>(coeffs.size()); }
  int num_nodes() const { return coeffs.empty() ? 0 : static_cast<int>(coeffs[0].size()); }
};

/// gPC coefficients of nu(x, xi) = exp(g0(x) + sum_j g_j(x) xi_j):
///   nu_l(x) = exp(g0 + sum g_j^2 / 2) prod_d E[psi_{alpha_d}(zeta + g_d(x))],  zeta ~ N(0, 1).
/// The expectation is evaluated per node with a (2P + 2)-point Gauss-Hermite rule or in closed
/// form (g^n / sqrt(n!)).
StochasticViscosity lognormal_gpc_coeffs(const KLExpansion& kl, const MultiIndexSet& basis,
                                         ShiftedMoment method = ShiftedMoment::Quadrature);

/// Deterministic viscosity nu(x) on every node (single coefficient).
StochasticViscosity constant_viscosity(const MultiIndexSet& basis, int num_nodes, double nu);

/// sum_l nu_l(x) psi_l(xi). If negative_count is given it receives the number of nodes with a
/// non-positive value (a truncation artifact; the field is still returned).
NodalField sample_viscosity(const StochasticViscosity& visc, std::span<const double> xi, int* negative_count = nullptr);

}  // namespace sgns
