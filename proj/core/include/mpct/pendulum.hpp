#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include "mpct/warmstart.hpp"

namespace mpct::pendulum {

/// Two-wheeled inverted pendulum. State (phi, phi_dot, theta_dot), input
/// theta_ddot (wheel angular acceleration).
struct PendulumParams {
  double m_r = 0.064;           // wheel mass [kg]
  double M_body = 1.039;        // robot mass incl. wheels [kg]
  double wheel_radius = 0.05;   // [m]
  double L = 0.05;              // wheel axis to centre of gravity [m]
  double g = 9.81;              // [m/s^2]
  double I_yy = 2 * 1.039 * 0.05 * 0.05;  // ~ 2 M L^2

  /// Params with I_yy recomputed from M_body and L.
  static PendulumParams with_derived_inertia(double m_r, double M_body,
                                             double wheel_radius, double L,
                                             double g);
};

struct SimConfig {
  double Ts = 0.02;
  int steps = 250;
  int substeps = 10;
  double scale = 20.0;
};

struct Trajectory {
  std::vector<VectorXd> states;  // steps + 1, physical units
  std::vector<VectorXd> inputs;  // physical units
  std::vector<VectorXd> artificial_refs;  // (x_s, u_s), physical units
  std::vector<int> iterations;
  std::vector<double> residuals;
  std::vector<std::chrono::nanoseconds> wall_times;
  /// Set when the loop stopped early on a solver breakdown.
  std::optional<std::string> abort_reason;

  int total_iterations() const;
};

/// Time derivative of the state under input u. Throws
/// kSingularConfiguration when the inertia term vanishes.
Eigen::Vector3d dynamics(const Eigen::Vector3d& state, double u,
                         const PendulumParams& params);

/// Classical RK4 with zero-order-hold input over `substeps` increments.
Eigen::Vector3d rk4_step(const Eigen::Vector3d& state, double u, double Ts,
                         int substeps, const PendulumParams& params);

/// Physical -> controller coordinates (theta_dot divided by scale).
VectorXd scale_state(const VectorXd& state, double scale);
VectorXd unscale_state(const VectorXd& state, double scale);
/// Controller -> physical input (multiplied by scale).
VectorXd unscale_input(const VectorXd& u_scaled, double scale);
VectorXd scale_input(const VectorXd& u, double scale);

/// Controller model, costs, horizon, penalty and solver tolerance of the
/// reference benchmark, in scaled coordinates.
struct Scenario {
  SystemModel model;
  CostWeights costs;
  MpctConfig config;
  double rho_base = 20.0;
  double rho_boosted = 1000.0;
  Eigen::Vector3d x0_physical{0.0, 0.0, 20.0};
};

Scenario reference_scenario(int N = 12);

/// Validated problem for the reference scenario.
ValidatedProblem reference_problem(int N = 12);

/// Closed-loop run: scale -> (warmstart) -> solve -> unscale -> integrate.
/// The first sample is always cold-started.
Trajectory closed_loop(const ValidatedProblem& problem,
                       const OfflineData& offline, const WarmstartGain* gain,
                       const SimConfig& sim, const VectorXd& x0_physical,
                       const VectorXd& reference, bool warmstart,
                       const PendulumParams& params = {});

}  // namespace mpct::pendulum
