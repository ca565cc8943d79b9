#include "aggalign/velocity_solver.hpp"

#include <Eigen/LU>
#include <cmath>
#include <limits>

namespace aggalign {

void WeightedConfiguration::validate() const {
  if (positions.rows() == 0) throw std::invalid_argument("configuration: no nodes");
  if (positions.cols() != 1 && positions.cols() != 2) {
    throw std::invalid_argument("configuration: dimension must be 1 or 2");
  }
  if (weights.size() != positions.rows()) {
    throw std::invalid_argument("configuration: weights/positions size mismatch");
  }
  if (!positions.allFinite()) throw std::invalid_argument("configuration: non-finite position");
  if ((weights.array() < 0.0).any() || !weights.allFinite()) {
    throw std::invalid_argument("configuration: weights must be finite and nonnegative");
  }
  if (!(weights.sum() > 0.0)) throw std::invalid_argument("configuration: total weight is zero");
}

namespace {

template <int D>
VelocitySystem assemble_impl(const WeightedConfiguration& config, const InfluenceFunction& f,
                             const InteractionPotential& p, double weight_threshold) {
  using Point = Eigen::Matrix<double, D, 1>;

  const double cutoff = weight_threshold * config.weights.maxCoeff();
  std::vector<Eigen::Index> active;
  for (Eigen::Index i = 0; i < config.size(); ++i) {
    if (config.weights(i) > cutoff) active.push_back(i);
  }
  if (active.empty()) {
    throw EmptyActiveSetError("assemble: no node weight exceeds the threshold");
  }

  const Eigen::Index n = static_cast<Eigen::Index>(active.size());
  VelocitySystem sys;
  sys.positions.resize(n, D);
  sys.weights.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    sys.positions.row(i) = config.positions.row(active[i]);
    sys.weights(i) = config.weights(active[i]);
  }
  sys.active_to_global = std::move(active);

  sys.A.setZero(n, n);
  sys.b.setZero(n, D);
  const double phi0 = phi(f, 0.0);

  // Pairwise fill; phi is symmetric and grad K antisymmetric, so each pair is
  // visited once. eta = phi(diameter) falls out of the same sweep.
  double max_dist = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Point xi = sys.positions.row(i).transpose();
    const double wi = sys.weights(i);
    for (Eigen::Index k = i + 1; k < n; ++k) {
      const Point d = xi - sys.positions.row(k).transpose();
      const double dist = d.norm();
      max_dist = std::max(max_dist, dist);
      const double ph = phi(f, dist);
      const double wk = sys.weights(k);
      sys.A(i, k) = -ph * wk;
      sys.A(k, i) = -ph * wi;
      sys.A(i, i) += ph * wk;
      sys.A(k, k) += ph * wi;
      Point g;
      if constexpr (D == 1) {
        g(0) = grad_k1(p, d(0));
      } else {
        g = grad_k2(p, d);
      }
      sys.b.row(i) -= wk * g.transpose();
      sys.b.row(k) += wi * g.transpose();
    }
  }
  sys.eta = phi(f, max_dist);
  return sys;
}

}  // namespace

VelocitySystem assemble(const WeightedConfiguration& config, const InfluenceFunction& f,
                        const InteractionPotential& p, double weight_threshold) {
  config.validate();
  if (weight_threshold < 0.0) throw std::invalid_argument("assemble: negative weight threshold");
  return config.dimension() == 1 ? assemble_impl<1>(config, f, p, weight_threshold)
                                 : assemble_impl<2>(config, f, p, weight_threshold);
}

Eigen::MatrixXd regularize(const VelocitySystem& sys) {
  const Eigen::Index n = sys.size();
  Eigen::MatrixXd M = sys.A;
  M.rowwise() += sys.eta * sys.weights.transpose();

  for (Eigen::Index i = 0; i < n; ++i) {
    double off = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
      if (k != i) off += std::abs(M(i, k));
    }
    if (!(std::abs(M(i, i)) > off)) {
      throw DominanceViolationError(
          "regularize: row " + std::to_string(i) +
          " is not strictly diagonally dominant (eta too large or invalid weights)");
    }
  }
  return M;
}

VelocitySolution solve_velocity(const VelocitySystem& sys) {
  Eigen::MatrixXd M = regularize(sys);
  Eigen::PartialPivLU<Eigen::Ref<Eigen::MatrixXd>> lu(M);  // factor in place

  VelocitySolution sol;
  sol.velocities = lu.solve(sys.b);

  // Residual against the original singular matrix, not M: this certifies on
  // every solve that b is range-compatible and the momentum constraint is
  // what selected the solution.
  const Eigen::MatrixXd residual = sys.A * sol.velocities - sys.b;
  sol.residual_inf = residual.cwiseAbs().maxCoeff();
  sol.momentum_residual = (sys.weights.transpose() * sol.velocities).cwiseAbs().maxCoeff();

  const double b_inf = sys.b.cwiseAbs().maxCoeff();
  if (!(sol.residual_inf <= 1e-9 * b_inf + 1e-12)) {
    throw SolveError("solve_velocity: residual " + std::to_string(sol.residual_inf) +
                     " exceeds tolerance");
  }
  const double u_inf = sol.velocities.size() ? sol.velocities.cwiseAbs().maxCoeff() : 0.0;
  if (!(sol.momentum_residual <= 1e-10 * sys.weights.sum() * u_inf + 1e-300)) {
    throw SolveError("solve_velocity: momentum residual " +
                     std::to_string(sol.momentum_residual) + " exceeds tolerance");
  }
  return sol;
}

NullSpaceReport null_space_checks(const VelocitySystem& sys) {
  const Eigen::Index n = sys.size();
  if (n < 2) throw std::invalid_argument("null_space_checks: need at least two active nodes");

  NullSpaceReport rep;

  double worst_row = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double scale = sys.A.row(i).cwiseAbs().sum();
    if (scale > 0.0) worst_row = std::max(worst_row, std::abs(sys.A.row(i).sum()) / scale);
  }
  rep.row_sum_inf = worst_row;
  rep.row_sums_ok = worst_row <= 1e-12;

  const double col_scale =
      sys.weights.cwiseAbs().sum() * sys.A.cwiseAbs().maxCoeff() +
      std::numeric_limits<double>::min();
  rep.weighted_col_sum_inf =
      (sys.A.transpose() * sys.weights).cwiseAbs().maxCoeff() / col_scale;
  rep.col_sums_ok = rep.weighted_col_sum_inf <= 1e-12;

  double rhs_scale = std::numeric_limits<double>::min();
  for (Eigen::Index c = 0; c < sys.b.cols(); ++c) {
    rhs_scale = std::max(rhs_scale, (sys.weights.array() * sys.b.col(c).array().abs()).sum());
  }
  rep.momentum_rhs_inf = (sys.weights.transpose() * sys.b).cwiseAbs().maxCoeff() / rhs_scale;
  rep.rhs_ok = rep.momentum_rhs_inf <= 1e-12;

  // Rank n-1 witness: drop the heaviest node; what remains must be strictly
  // diagonally dominant, row margin phi(|x_i - x_j|) * w_j > 0.
  Eigen::Index j;
  sys.weights.maxCoeff(&j);
  double min_margin = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (i == j) continue;
    double off = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
      if (k != i && k != j) off += std::abs(sys.A(i, k));
    }
    min_margin = std::min(min_margin, std::abs(sys.A(i, i)) - off);
  }
  rep.submatrix_min_margin = min_margin;
  rep.submatrix_dominant = min_margin > 0.0;
  return rep;
}

}  // namespace aggalign
