#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "aggalign/grid.hpp"
#include "aggalign/kinetic.hpp"
#include "aggalign/transport.hpp"

namespace aggalign {

/// Library version string, also echoed into run manifests.
const char* version();

/// Shortest round-trip decimal form of a double ("%.17g").
std::string format_double(double v);

/// snapshot_t<time with 6 decimals>.csv
std::string snapshot_filename(double time);

/// CSV with header x[,y],rho,u_x[,u_y], one row per node.
void write_snapshot_csv(const std::filesystem::path& path, const DensityField& field,
                        const Eigen::MatrixXd& velocities);

/// One JSON record with keys
/// {t, mass, momentum, com, support_radius, support_bound, clamped_mass, error_to_target}.
void append_diagnostics_jsonl(std::ostream& out, const SimDiagnostics& d, int dimension);

/// CSV with header epsilon,max_pos_err,max_vel_err,fluct_final,fluct_over_eps2.
void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRow>& rows);

/// manifest.json: config echo, library version, wall time. The config that
/// produced a run always travels with its artifacts.
void write_manifest(const std::filesystem::path& directory, const std::string& config_text,
                    double wall_time_seconds);

}  // namespace aggalign
