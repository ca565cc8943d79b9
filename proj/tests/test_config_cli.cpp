#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "aggalign/commands.hpp"
#include "aggalign/io.hpp"
#include "aggalign/sim_config.hpp"

using namespace aggalign;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("aggalign_test_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path write_file(const fs::path& dir, const std::string& name, const std::string& text) {
  const fs::path p = dir / name;
  std::ofstream out(p);
  out << text;
  return p;
}

const char* kSmallRunConfig = R"(
[simulation]
dimension = 1
domain_lower = -2
domain_upper = 2
h = 0.04
dt = 0.01
T = 0.2
snapshot_cadence = 10
seed = 7

[model]
potential = quartic_quadratic

[initial]
name = bump
s = 0.5

[target]
steady_state = two_delta

[output]
directory = OUTDIR
)";

}  // namespace

TEST_CASE("sim config: round-trips losslessly through serialization") {
  SimConfig c;
  c.dimension = 2;
  c.domain_lower = -2.2;
  c.domain_upper = 2.2;
  c.h = 0.08;
  c.dt = 0.0075;
  c.T = 12.5;
  c.snapshot_cadence = 123;
  c.seed = 987654321;
  c.renormalize_mass = true;
  c.integrator = KineticIntegrator::Strict;
  c.potential = {PotentialKind::NewtonianQuadratic};
  c.initial.name = "radial_quartic";
  c.initial.mass = 0.1 * 3.14159265358979323846;
  c.target = SteadyState::unit_disk();
  c.output_directory = "some/dir";

  const SimConfig parsed = parse_sim_config(serialize(c));
  CHECK(serialize(parsed) == serialize(c));
  CHECK(parsed.dimension == 2);
  CHECK(parsed.h == c.h);
  CHECK(parsed.dt == c.dt);
  CHECK(parsed.seed == c.seed);
  CHECK(parsed.integrator == KineticIntegrator::Strict);
  CHECK(parsed.target->kind == SteadyStateKind::UnitDisk);
}

TEST_CASE("sweep config: round-trips losslessly") {
  SweepConfig c;
  c.particle_count = 50;
  c.T = 1.0;
  c.eps_list = {0.1, 0.05, 0.025, 0.0125};
  c.dt_max = 0.005;
  c.seed = 31;
  const SweepConfig parsed = parse_sweep_config(serialize(c));
  CHECK(serialize(parsed) == serialize(c));
  CHECK(parsed.eps_list == c.eps_list);
}

TEST_CASE("sim config: errors name the offending field") {
  auto expect_field = [](const std::string& text, const std::string& field) {
    try {
      (void)parse_sim_config(text);
      FAIL_CHECK("expected ConfigError for field " << field);
    } catch (const ConfigError& e) {
      CHECK(e.field == field);
    }
  };
  expect_field("[simulation]\ndt = 0\n", "simulation.dt");
  expect_field("[simulation]\ndt = -0.1\n", "simulation.dt");
  expect_field("[simulation]\nT = 0\n", "simulation.T");
  expect_field("[model]\npotential = gravity\n", "model.potential");
  expect_field("[initial]\nname = vortex\n", "initial.name");
  expect_field("[simulation]\nh = 0.03\n", "simulation.h");  // 4/0.03 not integral
  expect_field("[simulation]\nmystery = 1\n", "simulation.mystery");
  expect_field("[initial]\nname = bump\ns = 3\n", "initial.s");  // support outside domain
  expect_field("[target]\ncenter = 0.5\n", "target.center");
}

TEST_CASE("cmd_run: produces snapshots, diagnostics, manifest; exit 0") {
  const fs::path dir = temp_dir("run");
  const fs::path out = dir / "artifacts";
  std::string text = kSmallRunConfig;
  text.replace(text.find("OUTDIR"), 6, out.string());
  const fs::path cfg = write_file(dir, "run.cfg", text);

  std::ostringstream log;
  const int rc = cmd_run({cfg.string()}, log);
  CHECK(rc == 0);
  CHECK(fs::exists(out / "diagnostics.jsonl"));
  CHECK(fs::exists(out / "manifest.json"));
  CHECK(fs::exists(out / "config_used.cfg"));
  CHECK(fs::exists(out / "snapshot_t0.000000.csv"));
  CHECK(fs::exists(out / "snapshot_t0.200000.csv"));

  // manifest embeds the exact config that reproduces the run
  const SimConfig echoed = load_sim_config((out / "config_used.cfg").string());
  CHECK(echoed.h == 0.04);
  CHECK(echoed.T == 0.2);

  // snapshot header matches the 1D contract
  const std::string snap = slurp(out / "snapshot_t0.000000.csv");
  CHECK(snap.rfind("x,rho,u_x\n", 0) == 0);

  // diagnostics: one record per step plus the initial one
  int lines = 0;
  std::istringstream jsonl(slurp(out / "diagnostics.jsonl"));
  for (std::string line; std::getline(jsonl, line);) {
    ++lines;
    CHECK(line.find("\"t\":") != std::string::npos);
    CHECK(line.find("\"support_radius\":") != std::string::npos);
    CHECK(line.find("\"error_to_target\":") != std::string::npos);
  }
  CHECK(lines == 21);
}

TEST_CASE("cmd_run: determinism, identical config gives identical diagnostics") {
  const fs::path dir = temp_dir("determinism");
  std::string text = kSmallRunConfig;
  text.replace(text.find("OUTDIR"), 6, (dir / "a").string());
  const fs::path cfg_a = write_file(dir, "a.cfg", text);
  std::ostringstream log;
  REQUIRE(cmd_run({cfg_a.string()}, log) == 0);

  RunCommandOptions again;
  again.config_path = cfg_a.string();
  again.output_directory = (dir / "b").string();
  REQUIRE(cmd_run(again, log) == 0);

  CHECK(slurp(dir / "a" / "diagnostics.jsonl") == slurp(dir / "b" / "diagnostics.jsonl"));
}

TEST_CASE("cmd_run: exit 2 on invalid config, naming the field") {
  const fs::path dir = temp_dir("badcfg");
  const fs::path cfg = write_file(dir, "bad.cfg", "[simulation]\ndt = -1\n");
  std::ostringstream log;
  CHECK(cmd_run({cfg.string()}, log) == 2);
  CHECK(log.str().find("simulation.dt") != std::string::npos);

  const fs::path cfg2 = write_file(dir, "bad2.cfg", "[model]\npotential = unknown_pot\n");
  std::ostringstream log2;
  CHECK(cmd_run({cfg2.string()}, log2) == 2);
  CHECK(cmd_run({(dir / "missing.cfg").string()}, log2) == 2);
}

TEST_CASE("cmd_run: --fast doubles h and dt") {
  const fs::path dir = temp_dir("fast");
  const fs::path out = dir / "out";
  std::string text = kSmallRunConfig;
  text.replace(text.find("OUTDIR"), 6, out.string());
  const fs::path cfg = write_file(dir, "run.cfg", text);
  RunCommandOptions opts;
  opts.config_path = cfg.string();
  opts.fast = true;
  std::ostringstream log;
  REQUIRE(cmd_run(opts, log) == 0);
  const SimConfig echoed = load_sim_config((out / "config_used.cfg").string());
  CHECK(echoed.h == doctest::Approx(0.08));
  CHECK(echoed.dt == doctest::Approx(0.02));
}

TEST_CASE("cmd_validate: default suite passes, break-eta trips dominance") {
  std::ostringstream log;
  ValidateCommandOptions opts;
  opts.cases = 40;  // smaller than the acceptance sweep, same machinery
  CHECK(cmd_validate(opts, log) == 0);
  CHECK(log.str().find("[PASS]") != std::string::npos);
  CHECK(log.str().find("[FAIL]") == std::string::npos);

  opts.break_eta = true;
  std::ostringstream log2;
  CHECK(cmd_validate(opts, log2) == 1);
  CHECK(log2.str().find("[FAIL]") != std::string::npos);
}

TEST_CASE("cmd_convergence: writes the table, asserts monotone decrease") {
  const fs::path dir = temp_dir("sweep");
  const fs::path out = dir / "out";
  SweepConfig sweep;
  sweep.particle_count = 12;
  sweep.T = 1.0;
  sweep.eps_list = {0.2, 0.1};
  sweep.output_directory = out.string();
  const fs::path cfg = write_file(dir, "sweep.cfg", serialize(sweep));

  std::ostringstream log;
  CHECK(cmd_convergence({cfg.string()}, log) == 0);
  const std::string csv = slurp(out / "convergence.csv");
  CHECK(csv.rfind("epsilon,max_pos_err,max_vel_err,fluct_final,fluct_over_eps2\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);  // header + 2 rows
  CHECK(fs::exists(out / "manifest.json"));
}

TEST_CASE("cmd_convergence: single epsilon passes without monotonicity assert") {
  const fs::path dir = temp_dir("sweep1");
  SweepConfig sweep;
  sweep.particle_count = 8;
  sweep.T = 0.5;
  sweep.eps_list = {0.1};
  sweep.output_directory = (dir / "out").string();
  const fs::path cfg = write_file(dir, "sweep.cfg", serialize(sweep));
  std::ostringstream log;
  CHECK(cmd_convergence({cfg.string()}, log) == 0);
}

TEST_CASE("cmd_convergence: non-decreasing eps list is a config error") {
  const fs::path dir = temp_dir("sweepbad");
  const fs::path cfg =
      write_file(dir, "sweep.cfg", "[sweep]\neps_list = 0.05,0.1\n");
  std::ostringstream log;
  CHECK(cmd_convergence({cfg.string()}, log) == 2);
  CHECK(log.str().find("sweep.eps_list") != std::string::npos);
}
