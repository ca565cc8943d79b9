#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace aggalign {

/// One named check of the solver validation suite with its worst observed
/// value and the threshold it is held to.
struct ValidationCheck {
  std::string name;
  double worst = 0.0;      // worst scaled violation (or margin, see larger_is_better)
  double threshold = 0.0;
  bool larger_is_better = false;
  bool passed = false;
};

struct ValidationSummary {
  std::vector<ValidationCheck> checks;
  int cases = 0;
  bool passed() const;
};

/// Randomized property suite over weighted configurations (Props. of the
/// discrete system: null space structure, dominance, momentum, symmetry,
/// eta-invariance, two-point closed form). break_eta multiplies eta by 10
/// before regularizing to demonstrate the dominance check tripping.
ValidationSummary run_solver_validation(std::uint64_t seed, int cases, bool break_eta);

void print_validation_table(std::ostream& out, const ValidationSummary& summary);

struct RunCommandOptions {
  std::string config_path;
  std::optional<std::string> output_directory;  // overrides the config
  std::optional<std::uint64_t> seed;            // overrides the config
  bool fast = false;                            // h and dt doubled
};

struct ValidateCommandOptions {
  std::uint64_t seed = 20240915;
  int cases = 200;
  bool break_eta = false;
};

struct ConvergenceCommandOptions {
  std::string config_path;
  std::optional<std::string> output_directory;
  std::optional<std::uint64_t> seed;
};

/// Exit codes: 0 success, 1 check failure, 2 invalid config, 3 runtime failure.
int cmd_run(const RunCommandOptions& options, std::ostream& log);
int cmd_validate(const ValidateCommandOptions& options, std::ostream& log);
int cmd_convergence(const ConvergenceCommandOptions& options, std::ostream& log);

}  // namespace aggalign
