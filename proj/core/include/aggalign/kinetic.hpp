#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <utility>
#include <vector>

#include "aggalign/kernels.hpp"
#include "aggalign/sim_config.hpp"

namespace aggalign {

struct StabilityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Second-order particle system with inertia epsilon; unit total mass split
/// evenly across particles.
struct KineticState {
  Eigen::MatrixXd positions;   // N x d
  Eigen::MatrixXd velocities;  // N x d
  double epsilon = 1.0;
  double time = 0.0;

  Eigen::Index n() const { return positions.rows(); }
  int dimension() const { return static_cast<int>(positions.cols()); }
  double mass_per_particle() const { return 1.0 / static_cast<double>(n()); }
  void validate() const;
};

/// Characteristics of the zero-inertia model: positions only, velocities
/// come from the constrained solve.
struct FirstOrderState {
  Eigen::MatrixXd positions;  // N x d
  double time = 0.0;
};

/// Right side of the velocity equation before division by epsilon:
/// (1/N) sum_j phi(|x_j - x_i|)(v_j - v_i) - (1/N) sum_j grad K(x_i - x_j).
Eigen::VectorXd kinetic_force(const KineticState& state, const InfluenceFunction& f,
                              const InteractionPotential& p, Eigen::Index i);

/// Mean squared force along the particles:
/// I = (1/N) sum_i |F_i|^2 with F_i the negated per-particle force. Decays
/// like epsilon^2 (after the initial layer) along solutions.
double fluctuation(const KineticState& state, const InfluenceFunction& f,
                   const InteractionPotential& p);

/// One step. Semi-implicit: positions by explicit Euler, velocities with the
/// alignment relaxation coefficient treated implicitly,
///   v_new = (v + (dt/eps)(a + g)) / (1 + (dt/eps) Phi_i),
/// which is unconditionally stable in the stiff relaxation. Strict: fully
/// explicit Euler, throws StabilityError unless dt <= 0.1 eps / phi(0).
KineticState step_kinetic(const KineticState& state, const InfluenceFunction& f,
                          const InteractionPotential& p, double dt,
                          KineticIntegrator integrator = KineticIntegrator::SemiImplicit);

/// Constrained velocities of the first-order model on a particle cloud
/// (weights 1/N each).
Eigen::MatrixXd first_order_reference(const Eigen::MatrixXd& positions,
                                      const InfluenceFunction& f, const InteractionPotential& p);

/// Forward Euler along the first-order characteristics.
FirstOrderState step_first_order(const FirstOrderState& state, const InfluenceFunction& f,
                                 const InteractionPotential& p, double dt);

struct SweepRow {
  double epsilon = 0.0;
  double max_pos_err = 0.0;     // max over t in [T/10, T] and particles
  double max_vel_err = 0.0;     // measured after the initial layer
  double fluct_final = 0.0;     // I(T)
  double fluct_over_eps2 = 0.0;
  double momentum_drift = 0.0;  // |sum v(T) - sum v(0)|, max over components
};

struct SweepOptions {
  double T = 2.0;
  double dt_max = 0.01;          // dt = min(dt_max, eps/4)
  double layer_fraction = 0.1;   // skip t < layer_fraction * T for velocity error
  KineticIntegrator integrator = KineticIntegrator::SemiImplicit;
};

/// Run the kinetic system and the first-order system from matched initial
/// positions for each epsilon; report trajectory and velocity errors against
/// the first-order reference. eps_list must be decreasing.
std::vector<SweepRow> epsilon_sweep(const Eigen::MatrixXd& positions0,
                                    const Eigen::MatrixXd& velocities0,
                                    const InfluenceFunction& f, const InteractionPotential& p,
                                    const std::vector<double>& eps_list,
                                    const SweepOptions& options);

/// Deterministic seeded cloud: positions uniform in [-box, box]^d, velocities
/// uniform in [-vscale, vscale]^d then shifted to zero mean.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> sample_cloud(int n, int dim, std::uint64_t seed,
                                                         double box = 1.0, double vscale = 0.5);

}  // namespace aggalign
