#include "aggalign/sim_config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace aggalign {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

// key -> value, keys qualified as "section.key"
using KeyValues = std::map<std::string, std::string>;

KeyValues parse_ini(const std::string& text) {
  KeyValues kv;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("line " + std::to_string(lineno), "malformed section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno), "expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    kv[section.empty() ? key : section + "." + key] = trim(line.substr(eq + 1));
  }
  return kv;
}

class Reader {
 public:
  explicit Reader(KeyValues kv) : kv_(std::move(kv)) {}

  bool has(const std::string& key) const { return kv_.count(key) != 0; }

  std::string str(const std::string& key, const std::string& fallback) {
    mark(key);
    auto it = kv_.find(key);
    return it == kv_.end() ? fallback : it->second;
  }
  std::string str_required(const std::string& key) {
    mark(key);
    auto it = kv_.find(key);
    if (it == kv_.end()) throw ConfigError(key, "missing required field");
    return it->second;
  }
  double num(const std::string& key, double fallback) {
    mark(key);
    auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    return to_double(key, it->second);
  }
  long integer(const std::string& key, long fallback) {
    mark(key);
    auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    const double v = to_double(key, it->second);
    if (v != std::floor(v)) throw ConfigError(key, "expected an integer");
    return static_cast<long>(v);
  }
  bool boolean(const std::string& key, bool fallback) {
    mark(key);
    auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    if (it->second == "true" || it->second == "1") return true;
    if (it->second == "false" || it->second == "0") return false;
    throw ConfigError(key, "expected true or false");
  }
  std::vector<double> list(const std::string& key, std::vector<double> fallback) {
    mark(key);
    auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    std::vector<double> out;
    std::istringstream ss(it->second);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(to_double(key, trim(tok)));
    if (out.empty()) throw ConfigError(key, "expected a comma-separated list");
    return out;
  }
  void reject_unknown() const {
    for (const auto& [key, value] : kv_) {
      if (!seen_.count(key)) throw ConfigError(key, "unknown field");
    }
  }

 private:
  static double to_double(const std::string& key, const std::string& value) {
    try {
      size_t pos = 0;
      const double v = std::stod(value, &pos);
      if (pos != value.size()) throw std::invalid_argument("trailing characters");
      return v;
    } catch (const std::exception&) {
      throw ConfigError(key, "cannot parse number from '" + value + "'");
    }
  }
  void mark(const std::string& key) { seen_.insert(key); }
  KeyValues kv_;
  mutable std::set<std::string> seen_;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("path", "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string to_string(KineticIntegrator integrator) {
  return integrator == KineticIntegrator::Strict ? "strict" : "semi_implicit";
}

KineticIntegrator integrator_from_name(std::string_view name) {
  if (name == "strict") return KineticIntegrator::Strict;
  if (name == "semi_implicit") return KineticIntegrator::SemiImplicit;
  throw ConfigError("integrator", "must be strict or semi_implicit");
}

std::string steady_state_name(const SteadyState& s) {
  switch (s.kind) {
    case SteadyStateKind::TwoDelta:
      return "two_delta";
    case SteadyStateKind::MorseCosine:
      return "morse_cosine";
    case SteadyStateKind::UnitDisk:
      return "unit_disk";
  }
  return "?";
}

SteadyState steady_state_from_name(std::string_view name, double center) {
  if (name == "two_delta") return SteadyState::two_delta();
  if (name == "morse_cosine") return SteadyState::morse_cosine(center);
  if (name == "unit_disk") return SteadyState::unit_disk();
  throw ConfigError("target.steady_state", "unknown steady state '" + std::string(name) + "'");
}

void SimConfig::validate() const {
  if (dimension != 1 && dimension != 2) throw ConfigError("simulation.dimension", "must be 1 or 2");
  if (!(h > 0.0)) throw ConfigError("simulation.h", "must be positive");
  if (!(dt > 0.0)) throw ConfigError("simulation.dt", "must be positive");
  if (!(T > 0.0)) throw ConfigError("simulation.T", "must be positive");
  if (snapshot_cadence < 1) throw ConfigError("simulation.snapshot_cadence", "must be >= 1");
  if (!(domain_upper > domain_lower)) {
    throw ConfigError("simulation.domain_upper", "domain must have positive width");
  }
  const double cells = (domain_upper - domain_lower) / h;
  if (std::abs(cells - std::round(cells)) > 1e-9) {
    throw ConfigError("simulation.h", "domain width must be an integer number of cells");
  }
  if (initial.name != "bump" && initial.name != "linear_ramp" && initial.name != "radial_quartic") {
    throw ConfigError("initial.name", "unknown initial condition '" + initial.name + "'");
  }
  if (initial.name == "radial_quartic") {
    if (dimension != 2) throw ConfigError("initial.name", "radial_quartic requires dimension 2");
    if (!(initial.mass > 0.0)) throw ConfigError("initial.mass", "must be positive");
    if (domain_lower > -2.0 || domain_upper < 2.0) {
      throw ConfigError("simulation.domain_lower", "domain must contain the initial support r < 2");
    }
  } else {
    if (dimension != 1) throw ConfigError("initial.name", initial.name + " requires dimension 1");
  }
  if (initial.name == "bump") {
    if (!(initial.s > 0.0)) throw ConfigError("initial.s", "must be positive");
    if (domain_lower > -initial.s || domain_upper < initial.s) {
      throw ConfigError("initial.s", "domain must contain the initial support (-s, s)");
    }
  }
  if (initial.name == "linear_ramp" && (domain_lower > -1.0 || domain_upper < 1.0)) {
    throw ConfigError("simulation.domain_lower", "domain must contain the initial support (-1, 1)");
  }
  if (output_directory.empty()) throw ConfigError("output.directory", "must not be empty");
}

SimConfig SimConfig::coarsened() const {
  SimConfig c = *this;
  c.h *= 2.0;
  c.dt *= 2.0;
  return c;
}

void SweepConfig::validate() const {
  if (particle_count < 1) throw ConfigError("sweep.N", "must be >= 1");
  if (dimension != 1 && dimension != 2) throw ConfigError("sweep.dimension", "must be 1 or 2");
  if (!(T > 0.0)) throw ConfigError("sweep.T", "must be positive");
  if (!(dt_max > 0.0)) throw ConfigError("sweep.dt_max", "must be positive");
  if (!(box > 0.0)) throw ConfigError("sweep.box", "must be positive");
  if (vscale < 0.0) throw ConfigError("sweep.vscale", "must be nonnegative");
  if (eps_list.empty()) throw ConfigError("sweep.eps_list", "must not be empty");
  for (double e : eps_list) {
    if (!(e > 0.0)) throw ConfigError("sweep.eps_list", "entries must be positive");
  }
  for (size_t i = 1; i < eps_list.size(); ++i) {
    if (!(eps_list[i] < eps_list[i - 1])) {
      throw ConfigError("sweep.eps_list", "must be strictly decreasing");
    }
  }
  if (output_directory.empty()) throw ConfigError("output.directory", "must not be empty");
}

SimConfig parse_sim_config(const std::string& text) {
  Reader r(parse_ini(text));
  SimConfig c;
  c.dimension = static_cast<int>(r.integer("simulation.dimension", c.dimension));
  c.domain_lower = r.num("simulation.domain_lower", c.domain_lower);
  c.domain_upper = r.num("simulation.domain_upper", c.domain_upper);
  c.h = r.num("simulation.h", c.h);
  c.dt = r.num("simulation.dt", c.dt);
  c.T = r.num("simulation.T", c.T);
  c.snapshot_cadence = static_cast<int>(r.integer("simulation.snapshot_cadence", c.snapshot_cadence));
  c.seed = static_cast<std::uint64_t>(r.integer("simulation.seed", static_cast<long>(c.seed)));
  c.renormalize_mass = r.boolean("simulation.renormalize_mass", c.renormalize_mass);
  c.integrator = integrator_from_name(r.str("simulation.integrator", to_string(c.integrator)));
  try {
    c.influence = influence_from_name(r.str("model.influence", to_string(c.influence.kind)));
  } catch (const std::invalid_argument& e) {
    throw ConfigError("model.influence", e.what());
  }
  try {
    c.potential = potential_from_name(r.str("model.potential", to_string(c.potential.kind)));
  } catch (const std::invalid_argument& e) {
    throw ConfigError("model.potential", e.what());
  }
  c.initial.name = r.str("initial.name", c.initial.name);
  c.initial.s = r.num("initial.s", c.initial.s);
  c.initial.mass = r.num("initial.mass", c.initial.mass);
  if (r.has("target.steady_state")) {
    const double center =
        r.num("target.center", SteadyState::kMorseCenterDefault);
    c.target = steady_state_from_name(r.str_required("target.steady_state"), center);
  } else if (r.has("target.center")) {
    throw ConfigError("target.center", "requires target.steady_state");
  }
  c.output_directory = r.str("output.directory", c.output_directory);
  r.reject_unknown();
  c.validate();
  return c;
}

std::string serialize(const SimConfig& c) {
  std::ostringstream out;
  out << "[simulation]\n";
  out << "dimension = " << c.dimension << "\n";
  out << "domain_lower = " << fmt(c.domain_lower) << "\n";
  out << "domain_upper = " << fmt(c.domain_upper) << "\n";
  out << "h = " << fmt(c.h) << "\n";
  out << "dt = " << fmt(c.dt) << "\n";
  out << "T = " << fmt(c.T) << "\n";
  out << "snapshot_cadence = " << c.snapshot_cadence << "\n";
  out << "seed = " << c.seed << "\n";
  out << "renormalize_mass = " << (c.renormalize_mass ? "true" : "false") << "\n";
  out << "integrator = " << to_string(c.integrator) << "\n";
  out << "\n[model]\n";
  out << "influence = " << to_string(c.influence.kind) << "\n";
  out << "potential = " << to_string(c.potential.kind) << "\n";
  out << "\n[initial]\n";
  out << "name = " << c.initial.name << "\n";
  out << "s = " << fmt(c.initial.s) << "\n";
  out << "mass = " << fmt(c.initial.mass) << "\n";
  if (c.target) {
    out << "\n[target]\n";
    out << "steady_state = " << steady_state_name(*c.target) << "\n";
    out << "center = " << fmt(c.target->center) << "\n";
  }
  out << "\n[output]\n";
  out << "directory = " << c.output_directory << "\n";
  return out.str();
}

SweepConfig parse_sweep_config(const std::string& text) {
  Reader r(parse_ini(text));
  SweepConfig c;
  c.particle_count = static_cast<int>(r.integer("sweep.N", c.particle_count));
  c.dimension = static_cast<int>(r.integer("sweep.dimension", c.dimension));
  c.T = r.num("sweep.T", c.T);
  c.eps_list = r.list("sweep.eps_list", c.eps_list);
  c.dt_max = r.num("sweep.dt_max", c.dt_max);
  c.box = r.num("sweep.box", c.box);
  c.vscale = r.num("sweep.vscale", c.vscale);
  c.seed = static_cast<std::uint64_t>(r.integer("sweep.seed", static_cast<long>(c.seed)));
  c.integrator = integrator_from_name(r.str("sweep.integrator", to_string(c.integrator)));
  try {
    c.influence = influence_from_name(r.str("model.influence", to_string(c.influence.kind)));
  } catch (const std::invalid_argument& e) {
    throw ConfigError("model.influence", e.what());
  }
  try {
    c.potential = potential_from_name(r.str("model.potential", to_string(c.potential.kind)));
  } catch (const std::invalid_argument& e) {
    throw ConfigError("model.potential", e.what());
  }
  c.output_directory = r.str("output.directory", c.output_directory);
  r.reject_unknown();
  c.validate();
  return c;
}

std::string serialize(const SweepConfig& c) {
  std::ostringstream out;
  out << "[sweep]\n";
  out << "N = " << c.particle_count << "\n";
  out << "dimension = " << c.dimension << "\n";
  out << "T = " << fmt(c.T) << "\n";
  out << "eps_list = ";
  for (size_t i = 0; i < c.eps_list.size(); ++i) {
    out << (i ? "," : "") << fmt(c.eps_list[i]);
  }
  out << "\n";
  out << "dt_max = " << fmt(c.dt_max) << "\n";
  out << "box = " << fmt(c.box) << "\n";
  out << "vscale = " << fmt(c.vscale) << "\n";
  out << "seed = " << c.seed << "\n";
  out << "integrator = " << to_string(c.integrator) << "\n";
  out << "\n[model]\n";
  out << "influence = " << to_string(c.influence.kind) << "\n";
  out << "potential = " << to_string(c.potential.kind) << "\n";
  out << "\n[output]\n";
  out << "directory = " << c.output_directory << "\n";
  return out.str();
}

SimConfig load_sim_config(const std::string& path) { return parse_sim_config(read_file(path)); }
SweepConfig load_sweep_config(const std::string& path) {
  return parse_sweep_config(read_file(path));
}

}  // namespace aggalign
