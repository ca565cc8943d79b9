#include "aggalign/io.hpp"

#include <cstdio>
#include <fstream>

#include <json.hpp>

namespace aggalign {

const char* version() {
#ifdef AGGALIGN_VERSION
  return AGGALIGN_VERSION;
#else
  return "0.0.0";
#endif
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string snapshot_filename(double time) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "snapshot_t%.6f.csv", time);
  return buf;
}

namespace {

std::ofstream open_or_throw(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  return out;
}

}  // namespace

void write_snapshot_csv(const std::filesystem::path& path, const DensityField& field,
                        const Eigen::MatrixXd& velocities) {
  if (velocities.rows() != field.rho.size() || velocities.cols() != field.grid.dimension) {
    throw std::invalid_argument("write_snapshot_csv: velocity shape mismatch");
  }
  std::ofstream out = open_or_throw(path);
  const bool two_d = field.grid.dimension == 2;
  out << (two_d ? "x,y,rho,u_x,u_y\n" : "x,rho,u_x\n");
  for (Eigen::Index i = 0; i < field.rho.size(); ++i) {
    const Eigen::Vector2d x = field.grid.position(i);
    out << format_double(x(0)) << ',';
    if (two_d) out << format_double(x(1)) << ',';
    out << format_double(field.rho(i)) << ',' << format_double(velocities(i, 0));
    if (two_d) out << ',' << format_double(velocities(i, 1));
    out << '\n';
  }
}

void append_diagnostics_jsonl(std::ostream& out, const SimDiagnostics& d, int dimension) {
  nlohmann::ordered_json j;
  j["t"] = d.time;
  j["mass"] = d.mass;
  std::vector<double> momentum(d.momentum.data(), d.momentum.data() + dimension);
  std::vector<double> com(d.center_of_mass.data(), d.center_of_mass.data() + dimension);
  j["momentum"] = momentum;
  j["com"] = com;
  j["support_radius"] = d.support_radius;
  if (d.support_bound) {
    j["support_bound"] = *d.support_bound;
  } else {
    j["support_bound"] = nullptr;
  }
  j["clamped_mass"] = d.clamped_mass;
  if (d.error_to_target) {
    j["error_to_target"] = *d.error_to_target;
  } else {
    j["error_to_target"] = nullptr;
  }
  out << j.dump() << '\n';
}

void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRow>& rows) {
  std::ofstream out = open_or_throw(path);
  out << "epsilon,max_pos_err,max_vel_err,fluct_final,fluct_over_eps2\n";
  for (const SweepRow& r : rows) {
    out << format_double(r.epsilon) << ',' << format_double(r.max_pos_err) << ','
        << format_double(r.max_vel_err) << ',' << format_double(r.fluct_final) << ','
        << format_double(r.fluct_over_eps2) << '\n';
  }
}

void write_manifest(const std::filesystem::path& directory, const std::string& config_text,
                    double wall_time_seconds) {
  nlohmann::ordered_json j;
  j["config"] = config_text;
  j["version"] = version();
  j["wall_time_seconds"] = wall_time_seconds;
  std::ofstream out = open_or_throw(directory / "manifest.json");
  out << j.dump(2) << '\n';
  // the exact config also as a loadable file
  std::ofstream cfg = open_or_throw(directory / "config_used.cfg");
  cfg << config_text;
}

}  // namespace aggalign
