#pragma once

#include <Eigen/Core>

#include "aggalign/grid.hpp"
#include "aggalign/kernels.hpp"

namespace aggalign {

enum class SteadyStateKind {
  TwoDelta,     // (delta_{-1/2} + delta_{+1/2}) / 2, quartic-quadratic equilibrium
  MorseCosine,  // cosine arch equilibrium of the Morse potential
  UnitDisk,     // constant 0.1 on the unit disk, Newtonian-quadratic equilibrium
};

struct SteadyState {
  SteadyStateKind kind = SteadyStateKind::TwoDelta;
  /// Center offset: MorseCosine is centered at the conserved center of mass of
  /// the run it is compared against (-1/3 for the bundled linear-ramp data).
  double center = 0.0;

  static SteadyState two_delta() { return {SteadyStateKind::TwoDelta, 0.0}; }
  static SteadyState morse_cosine(double center = kMorseCenterDefault) {
    return {SteadyStateKind::MorseCosine, center};
  }
  static SteadyState unit_disk() { return {SteadyStateKind::UnitDisk, 0.0}; }

  static constexpr double kMorseCenterDefault = -1.0 / 3.0;
};

/// Morse equilibrium constants: rho(x) = C (cos(mu (x - c)) - lambda) on
/// |x - c| < H. mu = 1/sqrt(2) and H = pi/sqrt(2) so mu H = pi/2;
/// lambda = -sqrt(2)/3 makes K * rho constant on the support (the constant
/// value is 2 C lambda = -1/(3 + pi/sqrt(2))); C = 3/(2 (pi + 3 sqrt(2)))
/// normalizes the mass to one.
struct MorseSteadyConstants {
  static double mu();
  static double lambda();
  static double half_width();
  static double amplitude();
};

/// Evaluate the Morse cosine equilibrium density at x (center c, mass one).
double eval_morse_steady(double x, double center = SteadyState::kMorseCenterDefault);

/// A finite measure on the line: atoms at points[i] with mass masses[i] >= 0.
struct DiscreteMeasure1D {
  Eigen::VectorXd points;
  Eigen::VectorXd masses;
};

/// Exact 1-Wasserstein distance between two discrete measures via the CDF
/// difference on the merged breakpoint set. nu is rescaled to mu's total mass.
double wasserstein1_1d(const DiscreteMeasure1D& mu, const DiscreteMeasure1D& nu);

/// Measure carried by a 1D density field: node masses h * rho_i at the nodes.
DiscreteMeasure1D measure_from_field(const DensityField& field);

/// Target measures for the 1D steady states (MorseCosine sampled on a fine grid).
DiscreteMeasure1D target_measure(const SteadyState& target);

/// h^d * sum |rho_i - target(x_i)|.
double l1_error_on_grid(const DensityField& field, const SteadyState& target);

/// Pointwise target density at a grid node (2D kinds).
double steady_state_density(const SteadyState& target, const Eigen::Vector2d& x);

/// W1 in 1D (atomic/any target), L1 in 2D.
double error_to_target(const DensityField& field, const SteadyState& target);

/// A-priori support estimate: (1/2) Psi^{-1}(Psi(2 S0) + 2 t gradK_inf).
double support_bound(double t, double S0, const InfluenceFunction& f, double gradK_inf);

}  // namespace aggalign
