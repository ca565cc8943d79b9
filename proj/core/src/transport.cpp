#include "aggalign/transport.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

namespace aggalign {

void DensityField::validate() const {
  if (rho.size() != grid.node_count()) {
    throw std::invalid_argument("density field: rho size does not match grid");
  }
  if ((rho.array() < 0.0).any() || !rho.allFinite()) {
    throw std::invalid_argument("density field: rho must be finite and nonnegative");
  }
  if (!(mass() > 0.0)) throw std::invalid_argument("density field: total mass is zero");
}

Grid Grid::make_1d(double lo, double hi, double h) {
  if (!(h > 0.0) || !(hi > lo)) throw std::invalid_argument("grid: invalid extent or spacing");
  const double cells = (hi - lo) / h;
  const int n = static_cast<int>(std::round(cells));
  if (std::abs(cells - n) > 1e-9) {
    throw std::invalid_argument("grid: width must be an integer number of cells");
  }
  Grid g;
  g.dimension = 1;
  g.lower = {lo, 0.0};
  g.spacing = h;
  g.counts = {n + 1, 1};
  return g;
}

Grid Grid::make_2d(double lo, double hi, double h) {
  Grid g = make_1d(lo, hi, h);
  g.dimension = 2;
  g.lower = {lo, lo};
  g.counts = {g.counts[0], g.counts[0]};
  return g;
}

Grid grid_from_config(const SimConfig& config) {
  return config.dimension == 1 ? Grid::make_1d(config.domain_lower, config.domain_upper, config.h)
                               : Grid::make_2d(config.domain_lower, config.domain_upper, config.h);
}

namespace {

struct GridVelocity {
  Eigen::MatrixXd u;         // node_count x d, zero at inactive nodes
  std::vector<char> active;  // node_count flags
  double max_speed = 0.0;    // over active nodes
  double momentum_residual = 0.0;
  double eta = 0.0;
};

GridVelocity solve_on_grid(const DensityField& field, const InfluenceFunction& f,
                           const InteractionPotential& p) {
  const Grid& g = field.grid;
  const Eigen::Index n = g.node_count();
  const int d = g.dimension;

  WeightedConfiguration config;
  config.positions.resize(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    config.positions.row(i) = g.position(i).head(d).transpose();
  }
  config.weights = g.cell_volume() * field.rho;

  const VelocitySystem sys = assemble(config, f, p);
  const VelocitySolution sol = solve_velocity(sys);

  GridVelocity out;
  out.u.setZero(n, d);
  out.active.assign(static_cast<size_t>(n), 0);
  for (size_t a = 0; a < sys.active_to_global.size(); ++a) {
    const Eigen::Index i = sys.active_to_global[a];
    out.u.row(i) = sol.velocities.row(static_cast<Eigen::Index>(a));
    out.active[static_cast<size_t>(i)] = 1;
  }
  out.max_speed = sol.velocities.size() ? sol.velocities.rowwise().norm().maxCoeff() : 0.0;
  out.momentum_residual = sol.momentum_residual;
  out.eta = sys.eta;
  return out;
}

// Conservative remap of one grid line, positions in units of the spacing.
// Cell i's edges sit at i -/+ 1/2; both move by (dt/h) * (edge velocity) and
// the cell mass spreads uniformly over the image interval, binned back onto
// cells by overlap. Edge velocities average the two adjacent node values; at
// a support frontier the edge follows its only active side, so an expanding
// support is not dammed by the zero velocity outside it. Mass landing outside
// [-(1/2), count - 1/2) is returned as outflow.
double remap_line(const double* mass_in, const double* u, const char* active, int count,
                  double dt_over_h, double* mass_out) {
  for (int i = 0; i < count; ++i) mass_out[i] = 0.0;

  auto edge_velocity = [&](int e) {  // edge e sits between nodes e-1 and e
    const bool lA = e - 1 >= 0 && active[e - 1];
    const bool rA = e < count && active[e];
    if (lA && rA) return 0.5 * (u[e - 1] + u[e]);
    if (lA) return u[e - 1];
    if (rA) return u[e];
    return 0.0;
  };

  double outflow = 0.0;
  double y_prev = -0.5 + dt_over_h * edge_velocity(0);
  for (int i = 0; i < count; ++i) {
    const double y = (i + 0.5) + dt_over_h * edge_velocity(i + 1);
    const double m = mass_in[i];
    if (m != 0.0) {
      double a = y_prev, b = y;
      if (b <= a) b = a + 1e-14;  // fully compressed cell, keep a sliver
      const double width = b - a;
      const int ja = static_cast<int>(std::floor(a + 0.5));
      const int jb = static_cast<int>(std::floor(b + 0.5));
      for (int j = ja; j <= jb; ++j) {
        const double cl = j - 0.5, cr = j + 0.5;
        const double ov = std::min(b, cr) - std::max(a, cl);
        if (ov <= 0.0) continue;
        const double piece = m * (ov / width);
        if (j >= 0 && j < count) mass_out[j] += piece;
        else outflow += piece;
      }
    }
    y_prev = y;
  }
  return outflow;
}

// One remap of the whole field along the solved velocities (split in 2D).
DensityField advance(const DensityField& field, const GridVelocity& v, double dt,
                     StepInfo& info) {
  const Grid& g = field.grid;
  const double dt_over_h = dt / g.spacing;
  const double vol = g.cell_volume();

  info.max_speed = v.max_speed;
  info.momentum_residual = v.momentum_residual;
  info.eta = v.eta;
  info.cfl_violated = dt * v.max_speed > g.spacing;

  DensityField next;
  next.grid = g;
  next.time = field.time + dt;

  // The remap is linear, so it can run directly on densities; only the
  // outflow needs the cell volume. Keeps u == 0 an exact identity.
  if (g.dimension == 1) {
    const int n = g.counts[0];
    Eigen::VectorXd out(n);
    info.outflow_mass += vol * remap_line(field.rho.data(), v.u.col(0).data(),
                                          v.active.data(), n, dt_over_h, out.data());
    next.rho = std::move(out);
    return next;
  }

  const int nx = g.counts[0], ny = g.counts[1];
  Eigen::VectorXd m = field.rho;
  Eigen::VectorXd m2(m.size());
  std::vector<double> line_m(nx), line_u(nx), line_out(nx);
  std::vector<char> line_a(nx);

  auto pass_y = [&](const Eigen::VectorXd& src, Eigen::VectorXd& dst) {
    for (int i = 0; i < nx; ++i) {
      const Eigen::Index base = static_cast<Eigen::Index>(i) * ny;
      info.outflow_mass += remap_line(src.data() + base, v.u.col(1).data() + base,
                                      v.active.data() + base, ny, dt_over_h, dst.data() + base);
    }
  };
  auto pass_x = [&](const Eigen::VectorXd& src, Eigen::VectorXd& dst) {
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        const Eigen::Index idx = g.flat(i, j);
        line_m[i] = src(idx);
        line_u[i] = v.u(idx, 0);
        line_a[i] = v.active[static_cast<size_t>(idx)];
      }
      info.outflow_mass += remap_line(line_m.data(), line_u.data(), line_a.data(), nx,
                                      dt_over_h, line_out.data());
      for (int i = 0; i < nx; ++i) dst(g.flat(i, j)) = line_out[i];
    }
  };

  // alternate the split order step by step
  const bool x_first = (std::llround(field.time / dt) % 2) == 0;
  if (x_first) {
    pass_x(m, m2);
    pass_y(m2, m);
  } else {
    pass_y(m, m2);
    pass_x(m2, m);
  }
  next.rho = m / vol;
  return next;
}

struct TargetContext {
  std::optional<SteadyState> target;
  std::optional<DiscreteMeasure1D> target_1d;

  explicit TargetContext(const SimConfig& config) : target(config.target) {
    if (target && config.dimension == 1) target_1d = target_measure(*target);
  }
  std::optional<double> error(const DensityField& field) const {
    if (!target) return std::nullopt;
    if (target_1d) return wasserstein1_1d(measure_from_field(field), *target_1d);
    return l1_error_on_grid(field, *target);
  }
};

SimDiagnostics diagnostics_for(const DensityField& field, const GridVelocity& v,
                               const StepInfo& info, const TargetContext& targets) {
  const Grid& g = field.grid;
  SimDiagnostics d;
  d.time = field.time;
  d.mass = field.mass();
  const double vol = g.cell_volume();
  for (Eigen::Index i = 0; i < field.rho.size(); ++i) {
    const double m = vol * field.rho(i);
    d.momentum.head(g.dimension) += m * v.u.row(i).transpose();
    d.center_of_mass += m * g.position(i);
  }
  d.center_of_mass /= d.mass;
  if (g.dimension == 1) d.center_of_mass(1) = 0.0;
  d.support_radius = support_radius(field);
  d.clamped_mass = info.clamped_mass;
  d.max_speed = v.max_speed;
  d.momentum_residual = v.momentum_residual;
  d.outflow_mass = info.outflow_mass;
  d.error_to_target = targets.error(field);
  return d;
}

}  // namespace

double support_radius(const DensityField& field) {
  const double cutoff = kSupportThreshold * field.rho.maxCoeff();
  double radius = 0.0;
  for (Eigen::Index i = 0; i < field.rho.size(); ++i) {
    if (field.rho(i) > cutoff) {
      const double r = field.grid.dimension == 1 ? std::abs(field.grid.position(i)(0))
                                                 : field.grid.position(i).norm();
      radius = std::max(radius, r);
    }
  }
  return radius;
}

Eigen::MatrixXd velocity_on_grid(const DensityField& field, const InfluenceFunction& f,
                                 const InteractionPotential& p) {
  field.validate();
  return solve_on_grid(field, f, p).u;
}

DensityField step(const DensityField& field, const InfluenceFunction& f,
                  const InteractionPotential& p, double dt, StepInfo* info) {
  if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be positive");
  field.validate();
  const GridVelocity v = solve_on_grid(field, f, p);
  StepInfo local;
  DensityField next = advance(field, v, dt, local);
  if (info) *info = local;
  return next;
}

DensityField initial_density(const Grid& grid, const InitialCondition& ic) {
  DensityField field;
  field.grid = grid;
  field.rho.setZero(grid.node_count());

  if (ic.name == "bump") {
    if (grid.dimension != 1) throw std::invalid_argument("bump initial data is one-dimensional");
    const double s = ic.s;
    for (int i = 0; i < grid.counts[0]; ++i) {
      const double x = grid.coord(0, i);
      const double gap = s * s - x * x;
      if (gap > 0.0) field.rho(i) = std::exp(-1.0 / gap);
    }
    const double mass = field.mass();
    if (!(mass > 0.0)) throw std::invalid_argument("bump: support contains no grid node");
    field.rho /= mass;  // unit mass by midpoint quadrature
    return field;
  }

  if (ic.name == "linear_ramp") {
    if (grid.dimension != 1) {
      throw std::invalid_argument("linear_ramp initial data is one-dimensional");
    }
    for (int i = 0; i < grid.counts[0]; ++i) {
      const double x = grid.coord(0, i);
      if (std::abs(x + 1.0) < 1e-9 * grid.spacing) {
        field.rho(i) = 0.5;  // midpoint value at the jump node
      } else if (x > -1.0 && x < 1.0) {
        field.rho(i) = 0.5 * (1.0 - x);
      }
    }
    return field;
  }

  if (ic.name == "radial_quartic") {
    if (grid.dimension != 2) throw std::invalid_argument("radial_quartic initial data is 2D");
    for (Eigen::Index i = 0; i < grid.node_count(); ++i) {
      const double r = grid.position(i).norm();
      if (r > 1.0 && r < 2.0) {
        field.rho(i) = (r - 1.0) * (r - 1.0) * (r - 2.0) * (r - 2.0);
      }
    }
    const double mass = field.mass();
    if (!(mass > 0.0)) throw std::invalid_argument("radial_quartic: no grid node in the annulus");
    field.rho *= ic.mass / mass;
    return field;
  }

  throw std::invalid_argument("unknown initial condition: " + ic.name);
}

RunResult run(const SimConfig& config, const RunObserver* observer) {
  config.validate();

  const Grid grid = grid_from_config(config);
  DensityField field = initial_density(grid, config.initial);
  const double mass0 = field.mass();

  const TargetContext targets(config);

  std::optional<double> grad_sup;
  if (has_bounded_gradient(config.potential.kind)) grad_sup = grad_k_sup(config.potential);
  const double S0_padded = support_radius(field) + kSupportBoundPadCells * grid.spacing;

  const long nsteps = std::llround(config.T / config.dt);
  RunResult result;
  result.diagnostics.reserve(static_cast<size_t>(nsteps) + 1);

  auto emit = [&](SimDiagnostics d) {
    if (grad_sup) d.support_bound = support_bound(d.time, S0_padded, config.influence, *grad_sup);
    if (observer && observer->on_diagnostics) observer->on_diagnostics(d);
    result.diagnostics.push_back(std::move(d));
  };
  auto snapshot = [&](const DensityField& fld, const GridVelocity& v) {
    if (observer && observer->on_snapshot) observer->on_snapshot(fld, v.u);
  };

  GridVelocity v = solve_on_grid(field, config.influence, config.potential);
  emit(diagnostics_for(field, v, StepInfo{}, targets));
  snapshot(field, v);

  for (long k = 0; k < nsteps; ++k) {
    StepInfo info;
    field = advance(field, v, config.dt, info);
    if (info.cfl_violated) {
      if (result.cfl_violations == 0) {
        std::fprintf(stderr,
                     "warning: dt * max|u| = %.3g exceeds h = %.3g at t = %.4f "
                     "(remap handles multi-cell moves; accuracy degrades)\n",
                     config.dt * info.max_speed, grid.spacing, field.time);
      }
      ++result.cfl_violations;
    }
    if (config.renormalize_mass) field.rho *= mass0 / field.mass();

    v = solve_on_grid(field, config.influence, config.potential);
    emit(diagnostics_for(field, v, info, targets));

    if (result.diagnostics.back().mass < 0.5 * mass0) {
      throw MassCollapseError("run: more than half the mass left the domain at t = " +
                              std::to_string(field.time));
    }
    if ((k + 1) % config.snapshot_cadence == 0 || k + 1 == nsteps) snapshot(field, v);
  }

  result.final_field = std::move(field);
  result.steps = nsteps;
  return result;
}

}  // namespace aggalign
