#include "aggalign/kinetic.hpp"

#include <cmath>
#include <random>

#include "aggalign/velocity_solver.hpp"

namespace aggalign {

void KineticState::validate() const {
  if (positions.rows() < 1) throw std::invalid_argument("kinetic state: need N >= 1");
  if (positions.cols() != 1 && positions.cols() != 2) {
    throw std::invalid_argument("kinetic state: dimension must be 1 or 2");
  }
  if (velocities.rows() != positions.rows() || velocities.cols() != positions.cols()) {
    throw std::invalid_argument("kinetic state: velocity shape mismatch");
  }
  if (!(epsilon > 0.0)) throw std::invalid_argument("kinetic state: epsilon must be positive");
  if (!positions.allFinite() || !velocities.allFinite()) {
    throw std::invalid_argument("kinetic state: non-finite entries");
  }
}

namespace {

// alignment coefficient Phi_i, alignment pull a_i, gradient drift g_i
struct PairSums {
  Eigen::VectorXd phi_sum;   // Phi_i = (1/N) sum_{j != i} phi(|x_j - x_i|)
  Eigen::MatrixXd align;     // a_i = (1/N) sum_{j != i} phi(|x_j - x_i|) v_j
  Eigen::MatrixXd drift;     // g_i = -(1/N) sum_{j != i} grad K(x_i - x_j)
};

PairSums pair_sums(const Eigen::MatrixXd& x, const Eigen::MatrixXd& v,
                   const InfluenceFunction& f, const InteractionPotential& p) {
  const Eigen::Index n = x.rows();
  const int d = static_cast<int>(x.cols());
  PairSums s;
  s.phi_sum.setZero(n);
  s.align.setZero(n, d);
  s.drift.setZero(n, d);

  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      Eigen::Vector2d diff = Eigen::Vector2d::Zero();
      diff.head(d) = (x.row(i) - x.row(j)).transpose();
      const double dist = diff.head(d).norm();
      const double ph = phi(f, dist);
      s.phi_sum(i) += ph;
      s.phi_sum(j) += ph;
      s.align.row(i) += ph * v.row(j);
      s.align.row(j) += ph * v.row(i);
      Eigen::Vector2d g = Eigen::Vector2d::Zero();
      if (d == 1) {
        g(0) = grad_k1(p, diff(0));
      } else {
        g = grad_k2(p, diff);
      }
      s.drift.row(i) -= g.head(d).transpose();
      s.drift.row(j) += g.head(d).transpose();
    }
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  s.phi_sum *= inv_n;
  s.align *= inv_n;
  s.drift *= inv_n;
  return s;
}

}  // namespace

Eigen::VectorXd kinetic_force(const KineticState& state, const InfluenceFunction& f,
                              const InteractionPotential& p, Eigen::Index i) {
  state.validate();
  if (i < 0 || i >= state.n()) throw std::out_of_range("kinetic_force: bad particle index");
  const PairSums s = pair_sums(state.positions, state.velocities, f, p);
  return (s.align.row(i) - s.phi_sum(i) * state.velocities.row(i) + s.drift.row(i)).transpose();
}

double fluctuation(const KineticState& state, const InfluenceFunction& f,
                   const InteractionPotential& p) {
  state.validate();
  const PairSums s = pair_sums(state.positions, state.velocities, f, p);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < state.n(); ++i) {
    acc += (s.align.row(i) - s.phi_sum(i) * state.velocities.row(i) + s.drift.row(i))
               .squaredNorm();
  }
  return acc / static_cast<double>(state.n());
}

KineticState step_kinetic(const KineticState& state, const InfluenceFunction& f,
                          const InteractionPotential& p, double dt,
                          KineticIntegrator integrator) {
  state.validate();
  if (!(dt > 0.0)) throw std::invalid_argument("step_kinetic: dt must be positive");

  const double alpha = dt / state.epsilon;
  const PairSums s = pair_sums(state.positions, state.velocities, f, p);

  KineticState next;
  next.epsilon = state.epsilon;
  next.time = state.time + dt;
  next.positions = state.positions + dt * state.velocities;

  if (integrator == KineticIntegrator::Strict) {
    const double dt_bound = 0.1 * state.epsilon / phi(f, 0.0);
    if (dt > dt_bound) {
      throw StabilityError("step_kinetic: strict integrator requires dt <= " +
                           std::to_string(dt_bound));
    }
    next.velocities =
        state.velocities +
        alpha * (s.align - s.phi_sum.asDiagonal() * state.velocities + s.drift);
  } else {
    next.velocities = (state.velocities + alpha * (s.align + s.drift)).array().colwise() /
                      (1.0 + alpha * s.phi_sum.array());
  }
  return next;
}

Eigen::MatrixXd first_order_reference(const Eigen::MatrixXd& positions,
                                      const InfluenceFunction& f, const InteractionPotential& p) {
  const Eigen::Index n = positions.rows();
  if (n < 1) throw std::invalid_argument("first_order_reference: need N >= 1");
  if (n == 1) return Eigen::MatrixXd::Zero(1, positions.cols());

  WeightedConfiguration config;
  config.positions = positions;
  config.weights = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  const VelocitySystem sys = assemble(config, f, p);
  const VelocitySolution sol = solve_velocity(sys);
  // all weights equal, so every node is active and ordering is preserved
  return sol.velocities;
}

FirstOrderState step_first_order(const FirstOrderState& state, const InfluenceFunction& f,
                                 const InteractionPotential& p, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("step_first_order: dt must be positive");
  FirstOrderState next;
  next.positions = state.positions + dt * first_order_reference(state.positions, f, p);
  next.time = state.time + dt;
  return next;
}

std::vector<SweepRow> epsilon_sweep(const Eigen::MatrixXd& positions0,
                                    const Eigen::MatrixXd& velocities0,
                                    const InfluenceFunction& f, const InteractionPotential& p,
                                    const std::vector<double>& eps_list,
                                    const SweepOptions& options) {
  if (eps_list.empty()) throw std::invalid_argument("epsilon_sweep: empty eps_list");
  for (size_t i = 1; i < eps_list.size(); ++i) {
    if (!(eps_list[i] < eps_list[i - 1])) {
      throw std::invalid_argument("epsilon_sweep: eps_list must be strictly decreasing");
    }
  }
  const double mean_v0 = velocities0.colwise().sum().cwiseAbs().maxCoeff();
  if (mean_v0 > 1e-9 * (1.0 + velocities0.cwiseAbs().maxCoeff()) * velocities0.rows()) {
    throw std::invalid_argument("epsilon_sweep: initial cloud must have zero net velocity");
  }

  std::vector<SweepRow> table;
  table.reserve(eps_list.size());
  for (const double eps : eps_list) {
    const double dt = std::min(options.dt_max, eps / 4.0);
    const long nsteps = std::llround(options.T / dt);

    KineticState kin{positions0, velocities0, eps, 0.0};
    FirstOrderState ref{positions0, 0.0};

    SweepRow row;
    row.epsilon = eps;
    const Eigen::RowVectorXd sum_v0 = velocities0.colwise().sum();
    const double t_layer = options.layer_fraction * options.T;
    for (long k = 0; k < nsteps; ++k) {
      kin = step_kinetic(kin, f, p, dt, options.integrator);
      ref = step_first_order(ref, f, p, dt);
      if (kin.time >= t_layer) {
        row.max_pos_err = std::max(
            row.max_pos_err, (kin.positions - ref.positions).rowwise().norm().maxCoeff());
        const Eigen::MatrixXd u_ref = first_order_reference(ref.positions, f, p);
        row.max_vel_err =
            std::max(row.max_vel_err, (kin.velocities - u_ref).rowwise().norm().maxCoeff());
      }
    }
    row.fluct_final = fluctuation(kin, f, p);
    row.fluct_over_eps2 = row.fluct_final / (eps * eps);
    row.momentum_drift =
        (kin.velocities.colwise().sum() - sum_v0).cwiseAbs().maxCoeff();
    table.push_back(row);
  }
  return table;
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> sample_cloud(int n, int dim, std::uint64_t seed,
                                                         double box, double vscale) {
  if (n < 1 || (dim != 1 && dim != 2)) {
    throw std::invalid_argument("sample_cloud: need n >= 1 and dim in {1, 2}");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(-box, box), uv(-vscale, vscale);
  Eigen::MatrixXd x(n, dim), v(n, dim);
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < dim; ++c) x(i, c) = ux(rng);
  }
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < dim; ++c) v(i, c) = uv(rng);
  }
  v.rowwise() -= v.colwise().mean();  // zero net momentum
  return {std::move(x), std::move(v)};
}

}  // namespace aggalign
