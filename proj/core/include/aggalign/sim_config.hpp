#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "aggalign/analysis.hpp"
#include "aggalign/kernels.hpp"

namespace aggalign {

/// Invalid or unreadable configuration; carries the offending field name.
struct ConfigError : std::runtime_error {
  std::string field;
  ConfigError(std::string field_, const std::string& what_)
      : std::runtime_error("config field '" + field_ + "': " + what_),
        field(std::move(field_)) {}
};

enum class KineticIntegrator { SemiImplicit, Strict };

std::string to_string(KineticIntegrator integrator);
KineticIntegrator integrator_from_name(std::string_view name);

struct InitialCondition {
  std::string name = "bump";  // bump | linear_ramp | radial_quartic
  double s = 0.5;             // bump support half-width
  double mass = 0.1 * 3.14159265358979323846;  // radial_quartic target mass
};

/// One transport experiment: grid, time stepping, model, data, outputs.
struct SimConfig {
  int dimension = 1;
  double domain_lower = -2.0;
  double domain_upper = 2.0;
  double h = 0.02;
  double dt = 0.005;
  double T = 10.0;
  int snapshot_cadence = 200;  // steps between snapshots
  std::uint64_t seed = 42;
  bool renormalize_mass = false;
  KineticIntegrator integrator = KineticIntegrator::SemiImplicit;
  InfluenceFunction influence;
  InteractionPotential potential;
  InitialCondition initial;
  std::optional<SteadyState> target;
  std::string output_directory = "out";

  void validate() const;  // throws ConfigError naming the field
  /// Halve the resolution (h and dt doubled) for quick runs.
  SimConfig coarsened() const;
};

/// Epsilon-sweep experiment for the kinetic/first-order comparison.
struct SweepConfig {
  int particle_count = 20;
  int dimension = 1;
  double T = 2.0;
  std::vector<double> eps_list{0.2, 0.1, 0.05};
  double dt_max = 0.01;
  double box = 1.0;     // initial positions uniform in [-box, box]^d
  double vscale = 0.5;  // initial velocities uniform in [-vscale, vscale]^d
  std::uint64_t seed = 42;
  KineticIntegrator integrator = KineticIntegrator::SemiImplicit;
  InfluenceFunction influence;
  InteractionPotential potential{PotentialKind::Morse};
  std::string output_directory = "out";

  void validate() const;
};

SimConfig parse_sim_config(const std::string& text);
SimConfig load_sim_config(const std::string& path);
std::string serialize(const SimConfig& config);

SweepConfig parse_sweep_config(const std::string& text);
SweepConfig load_sweep_config(const std::string& path);
std::string serialize(const SweepConfig& config);

std::string steady_state_name(const SteadyState& s);
SteadyState steady_state_from_name(std::string_view name, double center);

}  // namespace aggalign
