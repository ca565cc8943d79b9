#include "aggalign/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace aggalign {

double MorseSteadyConstants::mu() { return 1.0 / std::numbers::sqrt2; }
double MorseSteadyConstants::lambda() { return -std::numbers::sqrt2 / 3.0; }
double MorseSteadyConstants::half_width() { return std::numbers::pi / std::numbers::sqrt2; }
double MorseSteadyConstants::amplitude() {
  return 3.0 / (2.0 * (std::numbers::pi + 3.0 * std::numbers::sqrt2));
}

double eval_morse_steady(double x, double center) {
  const double y = x - center;
  if (std::abs(y) >= MorseSteadyConstants::half_width()) return 0.0;
  return MorseSteadyConstants::amplitude() *
         (std::cos(MorseSteadyConstants::mu() * y) - MorseSteadyConstants::lambda());
}

double wasserstein1_1d(const DiscreteMeasure1D& mu, const DiscreteMeasure1D& nu) {
  if (mu.points.size() == 0 || nu.points.size() == 0) {
    throw std::invalid_argument("wasserstein1_1d: empty measure");
  }
  const double m_mu = mu.masses.sum();
  const double m_nu = nu.masses.sum();
  if (!(m_mu > 0.0) || !(m_nu > 0.0)) {
    throw std::invalid_argument("wasserstein1_1d: measure with zero mass");
  }
  const double rescale = m_mu / m_nu;

  const Eigen::Index n = mu.points.size() + nu.points.size();
  std::vector<std::pair<double, double>> atoms;  // (position, signed mass)
  atoms.reserve(n);
  for (Eigen::Index i = 0; i < mu.points.size(); ++i) {
    atoms.emplace_back(mu.points(i), mu.masses(i));
  }
  for (Eigen::Index i = 0; i < nu.points.size(); ++i) {
    atoms.emplace_back(nu.points(i), -rescale * nu.masses(i));
  }
  std::sort(atoms.begin(), atoms.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  // W1 = integral of |CDF_mu - CDF_nu|, exact on the merged breakpoints.
  double w1 = 0.0, cdf = 0.0;
  for (size_t i = 0; i + 1 < atoms.size(); ++i) {
    cdf += atoms[i].second;
    w1 += std::abs(cdf) * (atoms[i + 1].first - atoms[i].first);
  }
  return w1;
}

DiscreteMeasure1D measure_from_field(const DensityField& field) {
  if (field.grid.dimension != 1) {
    throw std::invalid_argument("measure_from_field: field must be one-dimensional");
  }
  DiscreteMeasure1D m;
  m.points.resize(field.rho.size());
  for (Eigen::Index i = 0; i < field.rho.size(); ++i) {
    m.points(i) = field.grid.coord(0, static_cast<int>(i));
  }
  m.masses = field.grid.spacing * field.rho;
  return m;
}

DiscreteMeasure1D target_measure(const SteadyState& target) {
  switch (target.kind) {
    case SteadyStateKind::TwoDelta: {
      DiscreteMeasure1D m;
      m.points.resize(2);
      m.masses.resize(2);
      m.points << -0.5, 0.5;
      m.masses << 0.5, 0.5;
      return m;
    }
    case SteadyStateKind::MorseCosine: {
      // fine sampling of the arch; dx below the W1 resolution anyone measures
      const double dx = 5e-4;
      const double H = MorseSteadyConstants::half_width();
      const int n = static_cast<int>(std::floor(2.0 * H / dx)) + 1;
      DiscreteMeasure1D m;
      m.points.resize(n);
      m.masses.resize(n);
      for (int i = 0; i < n; ++i) {
        const double x = target.center - H + (i + 0.5) * dx;
        m.points(i) = x;
        m.masses(i) = dx * eval_morse_steady(x, target.center);
      }
      return m;
    }
    case SteadyStateKind::UnitDisk:
      throw std::invalid_argument("target_measure: UnitDisk has no 1D measure");
  }
  throw std::logic_error("target_measure: unknown steady state");
}

double steady_state_density(const SteadyState& target, const Eigen::Vector2d& x) {
  switch (target.kind) {
    case SteadyStateKind::UnitDisk:
      return x.norm() < 1.0 ? 0.1 : 0.0;
    case SteadyStateKind::MorseCosine:
      return eval_morse_steady(x(0), target.center);
    case SteadyStateKind::TwoDelta:
      throw std::invalid_argument("steady_state_density: TwoDelta is atomic");
  }
  throw std::logic_error("steady_state_density: unknown steady state");
}

double l1_error_on_grid(const DensityField& field, const SteadyState& target) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < field.rho.size(); ++i) {
    sum += std::abs(field.rho(i) - steady_state_density(target, field.grid.position(i)));
  }
  return field.grid.cell_volume() * sum;
}

double error_to_target(const DensityField& field, const SteadyState& target) {
  if (field.grid.dimension == 1) {
    return wasserstein1_1d(measure_from_field(field), target_measure(target));
  }
  return l1_error_on_grid(field, target);
}

double support_bound(double t, double S0, const InfluenceFunction& f, double gradK_inf) {
  if (!(std::isfinite(gradK_inf)) || gradK_inf < 0.0) {
    throw UnboundedGradientError("support_bound: gradient sup-norm must be finite");
  }
  return 0.5 * psi_inverse(f, psi(f, 2.0 * S0) + 2.0 * t * gradK_inf);
}

}  // namespace aggalign
