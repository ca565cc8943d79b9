#pragma once

#include <Eigen/Core>
#include <functional>
#include <optional>
#include <vector>

#include "aggalign/analysis.hpp"
#include "aggalign/grid.hpp"
#include "aggalign/kernels.hpp"
#include "aggalign/sim_config.hpp"
#include "aggalign/velocity_solver.hpp"

namespace aggalign {

struct MassCollapseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Relative density floor for the support-radius diagnostic. Larger than the
/// solver's active-set cutoff so remap dust does not count as support.
inline constexpr double kSupportThreshold = 1e-6;
/// The remap spreads mass up to one cell beyond its carrier and the measured
/// initial support is only node-resolved, so the support bound starts from
/// S_rho(0) padded by this many cells.
inline constexpr int kSupportBoundPadCells = 5;

/// Per-step scalars. momentum and center_of_mass carry zeros beyond the
/// grid dimension.
struct SimDiagnostics {
  double time = 0.0;
  double mass = 0.0;
  Eigen::Vector2d momentum = Eigen::Vector2d::Zero();
  Eigen::Vector2d center_of_mass = Eigen::Vector2d::Zero();
  double support_radius = 0.0;
  std::optional<double> support_bound;
  double clamped_mass = 0.0;
  std::optional<double> error_to_target;
  // not part of the serialized record:
  double max_speed = 0.0;
  double momentum_residual = 0.0;  // solver |w^T u|, max over components
  double outflow_mass = 0.0;       // mass that left the box this step
};

struct StepInfo {
  double outflow_mass = 0.0;
  double clamped_mass = 0.0;
  double max_speed = 0.0;       // over active nodes
  bool cfl_violated = false;    // dt * max_speed > h
  double momentum_residual = 0.0;
  double eta = 0.0;
};

/// Velocity field on every grid node: the constrained solve on the active
/// nodes (weight h^d rho_i above the relative threshold), zero elsewhere.
/// Returned matrix is node_count x d.
Eigen::MatrixXd velocity_on_grid(const DensityField& field, const InfluenceFunction& f,
                                 const InteractionPotential& p);

/// One forward semi-Lagrangian step of size dt.
///
/// Cell edges move one Euler step along the solved velocity field and each
/// cell's mass spreads uniformly over its image interval, binned back onto
/// the grid by overlap (dimension-split in 2D, pass order alternating by
/// step parity). The remap is exactly conservative and positivity-preserving;
/// mass whose image leaves the box is dropped and reported as outflow.
DensityField step(const DensityField& field, const InfluenceFunction& f,
                  const InteractionPotential& p, double dt, StepInfo* info = nullptr);

DensityField initial_density(const Grid& grid, const InitialCondition& ic);

Grid grid_from_config(const SimConfig& config);

struct RunResult {
  DensityField final_field;
  std::vector<SimDiagnostics> diagnostics;  // one per step, including t = 0
  long steps = 0;
  long cfl_violations = 0;
};

/// Callbacks fired during run(); snapshot also receives the velocity field.
struct RunObserver {
  std::function<void(const DensityField&, const Eigen::MatrixXd&)> on_snapshot;
  std::function<void(const SimDiagnostics&)> on_diagnostics;
};

/// Integrate from t = 0 to T, re-solving the velocity field every step.
/// Emits snapshots every snapshot_cadence steps (plus first and last) and
/// diagnostics every step. Aborts with MassCollapseError if more than half
/// the initial mass leaves the domain.
RunResult run(const SimConfig& config, const RunObserver* observer = nullptr);

/// Support radius of the field: max |x_i| over nodes with
/// rho_i > kSupportThreshold * max(rho).
double support_radius(const DensityField& field);

}  // namespace aggalign
