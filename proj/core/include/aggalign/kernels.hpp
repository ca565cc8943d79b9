#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <string>
#include <string_view>

namespace aggalign {

/// Thrown when a potential has no finite sup-norm gradient on the whole line/plane.
struct UnboundedGradientError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class InfluenceKind {
  InversePowerHalf,  // phi(r) = (1 + r^2)^(-1/2)
};

/// Nonnegative, non-increasing weight controlling alignment strength at distance r.
struct InfluenceFunction {
  InfluenceKind kind = InfluenceKind::InversePowerHalf;
};

/// phi(r). Requires r >= 0.
double phi(const InfluenceFunction& f, double r);

/// Psi(r) = integral of phi over [0, r]. Requires r >= 0.
/// Unbounded for slowly decaying influence functions, which is what makes
/// the support estimate in support_bound() global in time.
double psi(const InfluenceFunction& f, double r);

/// Inverse of Psi on [0, inf). Closed form for the shipped kind, bisection otherwise.
double psi_inverse(const InfluenceFunction& f, double y);

enum class PotentialKind {
  QuarticQuadratic,    // K(x) = |x|^4/4 - |x|^2/2
  Morse,               // K(x) = -exp(-|x|/2) + exp(-|x|)
  NewtonianQuadratic,  // K(x) = -log|x| + |x|^2/2
  Zero,                // K = 0, control case
};

/// Radially symmetric attractive-repulsive pair potential. Symmetric by
/// construction, so its gradient is odd and vanishes at the origin.
struct InteractionPotential {
  PotentialKind kind = PotentialKind::QuarticQuadratic;
};

/// K'(r) for r > 0; the value at r = 0 is defined as 0 (self-interaction vanishes).
double radial_derivative(const InteractionPotential& p, double r);

/// d/dx K(x) in one dimension; grad_k1(0) == 0 for every kind.
double grad_k1(const InteractionPotential& p, double x);

/// Gradient of K in two dimensions; returns zero at the origin.
Eigen::Vector2d grad_k2(const InteractionPotential& p, const Eigen::Vector2d& x);

/// Gradient at a point of dimension 1 or 2, as a dynamic vector.
Eigen::VectorXd grad_k(const InteractionPotential& p, const Eigen::VectorXd& x);

/// sup_r |K'(r)|, estimated by dense sampling near the origin and outward.
/// Throws UnboundedGradientError for kinds whose gradient grows without bound.
double grad_k_sup(const InteractionPotential& p);

bool has_bounded_gradient(PotentialKind kind);

/// Config-file names: "inverse_power_half", "quartic_quadratic", "morse",
/// "newtonian_quadratic", "zero".
InfluenceFunction influence_from_name(std::string_view name);
InteractionPotential potential_from_name(std::string_view name);
std::string to_string(InfluenceKind kind);
std::string to_string(PotentialKind kind);

}  // namespace aggalign
