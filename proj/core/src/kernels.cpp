#include "aggalign/kernels.hpp"

#include <cmath>

namespace aggalign {

namespace {

void require_nonnegative(double r, const char* who) {
  if (!(r >= 0.0)) {
    throw std::domain_error(std::string(who) + ": radius must be nonnegative, got " +
                            std::to_string(r));
  }
}

}  // namespace

double phi(const InfluenceFunction& f, double r) {
  require_nonnegative(r, "phi");
  switch (f.kind) {
    case InfluenceKind::InversePowerHalf:
      return 1.0 / std::sqrt(1.0 + r * r);
  }
  throw std::logic_error("phi: unknown influence kind");
}

double psi(const InfluenceFunction& f, double r) {
  require_nonnegative(r, "psi");
  switch (f.kind) {
    case InfluenceKind::InversePowerHalf:
      return std::asinh(r);
  }
  throw std::logic_error("psi: unknown influence kind");
}

double psi_inverse(const InfluenceFunction& f, double y) {
  require_nonnegative(y, "psi_inverse");
  switch (f.kind) {
    case InfluenceKind::InversePowerHalf:
      return std::sinh(y);
  }
  // Bisection fallback for influence kinds without a closed-form inverse.
  double lo = 0.0, hi = 1.0;
  while (psi(f, hi) < y) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    (psi(f, mid) < y ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double radial_derivative(const InteractionPotential& p, double r) {
  if (r == 0.0) return 0.0;
  switch (p.kind) {
    case PotentialKind::QuarticQuadratic:
      return r * r * r - r;
    case PotentialKind::Morse:
      return 0.5 * std::exp(-0.5 * r) - std::exp(-r);
    case PotentialKind::NewtonianQuadratic:
      return r - 1.0 / r;
    case PotentialKind::Zero:
      return 0.0;
  }
  throw std::logic_error("radial_derivative: unknown potential kind");
}

double grad_k1(const InteractionPotential& p, double x) {
  if (x == 0.0) return 0.0;
  const double g = radial_derivative(p, std::abs(x));
  return x > 0.0 ? g : -g;
}

Eigen::Vector2d grad_k2(const InteractionPotential& p, const Eigen::Vector2d& x) {
  const double r = x.norm();
  if (r == 0.0) return Eigen::Vector2d::Zero();
  return (radial_derivative(p, r) / r) * x;
}

Eigen::VectorXd grad_k(const InteractionPotential& p, const Eigen::VectorXd& x) {
  if (x.size() == 1) {
    Eigen::VectorXd g(1);
    g(0) = grad_k1(p, x(0));
    return g;
  }
  if (x.size() == 2) return grad_k2(p, Eigen::Vector2d(x(0), x(1)));
  throw std::invalid_argument("grad_k: dimension must be 1 or 2");
}

bool has_bounded_gradient(PotentialKind kind) {
  return kind == PotentialKind::Morse || kind == PotentialKind::Zero;
}

double grad_k_sup(const InteractionPotential& p) {
  if (!has_bounded_gradient(p.kind)) {
    throw UnboundedGradientError("grad_k_sup: |K'| unbounded for kind " + to_string(p.kind));
  }
  if (p.kind == PotentialKind::Zero) return 0.0;
  // geometric sweep from near the origin outward; |K'| decays past its local extrema
  double sup = 0.0;
  for (double r = 1e-12; r < 64.0; r *= 1.003) {
    sup = std::max(sup, std::abs(radial_derivative(p, r)));
  }
  return sup;
}

InfluenceFunction influence_from_name(std::string_view name) {
  if (name == "inverse_power_half") return {InfluenceKind::InversePowerHalf};
  throw std::invalid_argument("unknown influence function: " + std::string(name));
}

InteractionPotential potential_from_name(std::string_view name) {
  if (name == "quartic_quadratic") return {PotentialKind::QuarticQuadratic};
  if (name == "morse") return {PotentialKind::Morse};
  if (name == "newtonian_quadratic") return {PotentialKind::NewtonianQuadratic};
  if (name == "zero") return {PotentialKind::Zero};
  throw std::invalid_argument("unknown interaction potential: " + std::string(name));
}

std::string to_string(InfluenceKind kind) {
  switch (kind) {
    case InfluenceKind::InversePowerHalf:
      return "inverse_power_half";
  }
  return "?";
}

std::string to_string(PotentialKind kind) {
  switch (kind) {
    case PotentialKind::QuarticQuadratic:
      return "quartic_quadratic";
    case PotentialKind::Morse:
      return "morse";
    case PotentialKind::NewtonianQuadratic:
      return "newtonian_quadratic";
    case PotentialKind::Zero:
      return "zero";
  }
  return "?";
}

}  // namespace aggalign
