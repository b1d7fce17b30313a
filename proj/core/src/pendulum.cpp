#include "mpct/pendulum.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

namespace mpct::pendulum {

PendulumParams PendulumParams::with_derived_inertia(double m_r, double M_body,
                                                    double wheel_radius,
                                                    double L, double g) {
  PendulumParams p;
  p.m_r = m_r;
  p.M_body = M_body;
  p.wheel_radius = wheel_radius;
  p.L = L;
  p.g = g;
  p.I_yy = 2.0 * M_body * L * L;
  return p;
}

int Trajectory::total_iterations() const {
  return std::accumulate(iterations.begin(), iterations.end(), 0);
}

Eigen::Vector3d dynamics(const Eigen::Vector3d& state, double u,
                         const PendulumParams& p) {
  const double phi = state(0);
  const double phi_dot = state(1);
  const double s = std::sin(phi);
  const double c = std::cos(phi);
  const double MRL = p.M_body * p.wheel_radius * p.L;

  const double denom = p.I_yy + MRL * c;
  if (std::abs(denom) < 1e-12) {
    throw MpctError(ErrorCode::kSingularConfiguration,
                    "inertia term vanishes at phi = " + std::to_string(phi));
  }
  const double coupling =
      p.wheel_radius * p.wheel_radius * (3.0 * p.m_r + p.M_body) + MRL * c;
  const double phi_ddot =
      (MRL * phi_dot * phi_dot * s + p.M_body * p.g * p.L * s - coupling * u) /
      denom;
  return {phi_dot, phi_ddot, u};
}

Eigen::Vector3d rk4_step(const Eigen::Vector3d& state, double u, double Ts,
                         int substeps, const PendulumParams& p) {
  if (!(Ts > 0.0) || substeps < 1) {
    throw MpctError(ErrorCode::kInvalidArgument,
                    "Ts must be positive and substeps >= 1");
  }
  const double h = Ts / substeps;
  Eigen::Vector3d x = state;
  for (int i = 0; i < substeps; ++i) {
    const Eigen::Vector3d k1 = dynamics(x, u, p);
    const Eigen::Vector3d k2 = dynamics(x + 0.5 * h * k1, u, p);
    const Eigen::Vector3d k3 = dynamics(x + 0.5 * h * k2, u, p);
    const Eigen::Vector3d k4 = dynamics(x + h * k3, u, p);
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return x;
}

VectorXd scale_state(const VectorXd& state, double scale) {
  VectorXd out = state;
  out(2) /= scale;
  return out;
}

VectorXd unscale_state(const VectorXd& state, double scale) {
  VectorXd out = state;
  out(2) *= scale;
  return out;
}

VectorXd unscale_input(const VectorXd& u_scaled, double scale) {
  return u_scaled * scale;
}

VectorXd scale_input(const VectorXd& u, double scale) { return u / scale; }

Scenario reference_scenario(int N) {
  Scenario sc;
  SystemModel& model = sc.model;
  model.A.resize(3, 3);
  model.A << 1.013109, 0.020087, 0.0,  //
      1.31371, 1.013109, 0.0,          //
      0.0, 0.0, 1.0;
  model.B.resize(3, 1);
  model.B << -0.002919, -0.292577, 0.02;

  // |phi| <= pi/8, |theta_dot| <= 60 and |theta_ddot| <= 90 in physical
  // units; the last two are divided by the scale factor 20. phi_dot is free.
  const double big = kDefaultBigBound;
  const double phi_max = std::numbers::pi / 8.0;
  model.x_lb = Eigen::Vector3d(-phi_max, -big, -60.0 / 20.0);
  model.x_ub = Eigen::Vector3d(phi_max, big, 60.0 / 20.0);
  model.u_lb = VectorXd::Constant(1, -90.0 / 20.0);
  model.u_ub = VectorXd::Constant(1, 90.0 / 20.0);

  sc.costs.Q_diag = VectorXd::Constant(3, 5.0);
  sc.costs.R_diag = VectorXd::Constant(1, 0.025);
  sc.costs.T = 1000.0 * MatrixXd::Identity(3, 3);
  sc.costs.S = MatrixXd::Constant(1, 1, 0.125);

  sc.config.N = N;
  sc.config.epsilon = 1e-4;
  sc.config.max_iter = kDefaultMaxIter;
  sc.config.big_bound = big;
  return sc;
}

ValidatedProblem reference_problem(int N) {
  Scenario sc = reference_scenario(N);
  PenaltyParams rho = build_rho(sc.model, sc.config, sc.rho_base, sc.rho_boosted);
  return validate_problem(std::move(sc.model), std::move(sc.costs), sc.config,
                          std::move(rho));
}

Trajectory closed_loop(const ValidatedProblem& problem, const OfflineData& offline,
                       const WarmstartGain* gain, const SimConfig& sim,
                       const VectorXd& x0_physical, const VectorXd& reference,
                       bool warmstart, const PendulumParams& params) {
  const int n = problem.n();
  const int m = problem.m();
  if (n != 3 || m != 1 || x0_physical.size() != 3 || reference.size() != n + m) {
    throw MpctError(ErrorCode::kDimensionMismatch,
                    "pendulum loop needs a 3-state, 1-input problem");
  }
  if (warmstart && gain == nullptr) {
    throw MpctError(ErrorCode::kInvalidArgument, "warmstart requested without a gain");
  }
  if (!(sim.scale > 0.0) || sim.steps < 0) {
    throw MpctError(ErrorCode::kInvalidArgument, "invalid simulation settings");
  }

  const SolverSettings settings{problem.config().epsilon, problem.config().max_iter};
  VectorXd r(n + m);
  r << scale_state(reference.head(n), sim.scale),
      scale_input(reference.tail(m), sim.scale);

  Trajectory traj;
  Eigen::Vector3d x = x0_physical;
  traj.states.push_back(x);

  SolveResult prev;
  VectorXd x_prev_scaled;
  for (int k = 0; k < sim.steps; ++k) {
    const VectorXd xs = scale_state(x, sim.scale);
    SolverState initial = (warmstart && k > 0)
                              ? warmstart_predict(prev, *gain, x_prev_scaled, xs)
                              : cold_start(n, m, problem.horizon());

    const auto t0 = std::chrono::steady_clock::now();
    SolveResult res;
    try {
      res = eadmm_solve(offline, settings, xs, r, std::move(initial));
    } catch (const MpctError& e) {
      traj.abort_reason = e.what();
      break;
    }
    const auto t1 = std::chrono::steady_clock::now();

    const VectorXd u = unscale_input(res.u0, sim.scale);
    VectorXd ref(n + m);
    ref << unscale_state(res.xs_us.head(n), sim.scale),
        unscale_input(res.xs_us.tail(m), sim.scale);

    traj.inputs.push_back(u);
    traj.artificial_refs.push_back(ref);
    traj.iterations.push_back(res.iterations);
    traj.residuals.push_back(res.residual_inf);
    traj.wall_times.push_back(
        std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0));

    try {
      x = rk4_step(x, u(0), sim.Ts, sim.substeps, params);
    } catch (const MpctError& e) {
      traj.abort_reason = e.what();
      break;
    }
    traj.states.push_back(x);
    x_prev_scaled = xs;
    prev = std::move(res);
  }
  return traj;
}

}  // namespace mpct::pendulum
