#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <vector>

#include "aggalign/kernels.hpp"

namespace aggalign {

struct EmptyActiveSetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DominanceViolationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SolveError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Default relative cutoff below which a node counts as carrying no mass.
inline constexpr double kDefaultWeightThreshold = 1e-12;

/// Points with nonnegative masses; either grid nodes carrying h^d * rho_i or
/// particles carrying 1/N. The solver is agnostic to which.
struct WeightedConfiguration {
  Eigen::MatrixXd positions;  // n x d, d in {1, 2}
  Eigen::VectorXd weights;    // n, weights >= 0, sum > 0

  Eigen::Index size() const { return positions.rows(); }
  int dimension() const { return static_cast<int>(positions.cols()); }
  void validate() const;  // throws std::invalid_argument on violated invariants
};

/// Discrete alignment system on the active nodes.
///
/// A is singular by construction: every row sums to zero (constants lie in the
/// null space) and A^T w = 0, so the momentum functional spans the cokernel.
/// b is orthogonal to w componentwise because the gradient of a symmetric
/// potential is odd. eta is a positive lower bound for phi over active pairs.
struct VelocitySystem {
  Eigen::MatrixXd A;    // n_a x n_a, one block shared by all velocity components
  Eigen::MatrixXd b;    // n_a x d right-hand sides
  double eta = 0.0;     // 0 < eta <= min pairwise phi
  Eigen::VectorXd weights;              // active weights
  Eigen::MatrixXd positions;            // active positions, n_a x d
  std::vector<Eigen::Index> active_to_global;

  Eigen::Index size() const { return A.rows(); }
  int dimension() const { return static_cast<int>(b.cols()); }
};

/// Velocity on the active nodes plus the residual diagnostics every solve is
/// checked against: ||A u - b||_inf and the discrete momentum |w^T u|.
struct VelocitySolution {
  Eigen::MatrixXd velocities;  // n_a x d
  double residual_inf = 0.0;
  double momentum_residual = 0.0;
};

/// Assemble A, b and eta over the nodes with weight > threshold * max(weight)
/// by midpoint quadrature. Throws EmptyActiveSetError when nothing is active.
VelocitySystem assemble(const WeightedConfiguration& config, const InfluenceFunction& f,
                        const InteractionPotential& p,
                        double weight_threshold = kDefaultWeightThreshold);

/// M = A + eta * e w^T. Strictly diagonally dominant whenever
/// eta <= min pairwise phi (the row margin is exactly eta * sum(w)); throws
/// DominanceViolationError otherwise.
Eigen::MatrixXd regularize(const VelocitySystem& sys);

/// Solve M u = b with a dense LU factorization, one factorization for all d
/// components. The returned velocities satisfy the singular system A u = b
/// and the momentum constraint w^T u = 0; both residuals are verified against
/// tight tolerances and a SolveError is thrown if either fails.
VelocitySolution solve_velocity(const VelocitySystem& sys);

/// Witnesses for the structure of A established in the discretization theory:
/// A e = 0, A^T w = 0, w^T b = 0, and strict diagonal dominance of the
/// principal submatrix obtained by deleting the heaviest node.
struct NullSpaceReport {
  double row_sum_inf = 0.0;          // max_i |sum_k A_ik| / ||row_i||_1
  double weighted_col_sum_inf = 0.0; // max_k |sum_i w_i A_ik| scaled
  double momentum_rhs_inf = 0.0;     // max_c |w^T b_c| scaled
  double submatrix_min_margin = 0.0; // min_i (|M_ii| - sum |M_ik|) on the deleted system
  bool row_sums_ok = false;
  bool col_sums_ok = false;
  bool rhs_ok = false;
  bool submatrix_dominant = false;

  bool passed() const { return row_sums_ok && col_sums_ok && rhs_ok && submatrix_dominant; }
};

/// Requires at least two active nodes.
NullSpaceReport null_space_checks(const VelocitySystem& sys);

}  // namespace aggalign
