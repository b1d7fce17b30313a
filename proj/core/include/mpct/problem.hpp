#pragma once

#include <Eigen/Dense>

#include "mpct/error.hpp"

namespace mpct {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Default stand-in for the "arbitrarily large" bound on the initial state.
inline constexpr double kDefaultBigBound = 1e10;
/// Default tightening margin for the terminal (steady-state) box.
inline constexpr double kDefaultTightening = 1e-6;
inline constexpr int kDefaultMaxIter = 4000;

/// Discrete LTI prediction model x+ = A x + B u with box constraints.
struct SystemModel {
  MatrixXd A;
  MatrixXd B;
  VectorXd x_lb, x_ub;
  VectorXd u_lb, u_ub;
  VectorXd eps_x;  // tightening of the terminal state box
  VectorXd eps_u;  // tightening of the terminal input box

  int n() const { return static_cast<int>(A.rows()); }
  int m() const { return static_cast<int>(B.cols()); }
};

/// Stage weights Q, R (diagonal) and artificial-reference weights T, S.
struct CostWeights {
  VectorXd Q_diag;
  VectorXd R_diag;
  MatrixXd T;
  MatrixXd S;
};

/// Diagonal penalty split into its initial-state, terminal and congruence
/// parts. Column j of rho_hat belongs to prediction step j (0-based).
struct PenaltyParams {
  VectorXd rho0;     // n
  VectorXd rho_s;    // n+m
  MatrixXd rho_hat;  // (n+m) x (N+1)
};

struct MpctConfig {
  int N = 12;
  double epsilon = 1e-4;
  int max_iter = kDefaultMaxIter;
  double big_bound = kDefaultBigBound;
};

/// Which congruence entries build_rho boosts.
enum class BoostPattern {
  /// Initial-state x-rows of step 0, all rows of step N (plus rho0, rho_s).
  kConstraintList,
  /// Entire columns for steps 0 and N.
  kWholeColumn,
};

/// A problem whose dimensions and invariants have been checked once.
/// Only validate_problem() creates one.
class ValidatedProblem {
 public:
  const SystemModel& model() const { return model_; }
  const CostWeights& costs() const { return costs_; }
  const MpctConfig& config() const { return config_; }
  const PenaltyParams& rho() const { return rho_; }

  int n() const { return model_.n(); }
  int m() const { return model_.m(); }
  int nm() const { return model_.n() + model_.m(); }
  int horizon() const { return config_.N; }

 private:
  friend ValidatedProblem validate_problem(SystemModel, CostWeights,
                                           MpctConfig, PenaltyParams);
  ValidatedProblem() = default;

  SystemModel model_;
  CostWeights costs_;
  MpctConfig config_;
  PenaltyParams rho_;
};

/// Checks every invariant of the four inputs and bundles them. Missing
/// eps_x/eps_u (size 0) are filled with kDefaultTightening.
ValidatedProblem validate_problem(SystemModel model, CostWeights costs,
                                  MpctConfig config, PenaltyParams rho);

/// Two-level penalty: rho_boosted on the constraints that benefit from a
/// heavier penalty, rho_base on the remaining congruence constraints.
PenaltyParams build_rho(const SystemModel& model, const MpctConfig& config,
                        double rho_base, double rho_boosted,
                        BoostPattern pattern = BoostPattern::kConstraintList);

/// Uniform scalar penalty expanded to the three-part layout.
PenaltyParams uniform_rho(int n, int m, int N, double rho);

/// Largest penalty for which the three-block iteration is guaranteed to
/// converge: 6 * lambda_min(diag(Q, R)) / 17.
double compute_rho_upper_bound(const CostWeights& costs);

/// Largest entry of any part of the penalty.
double max_penalty(const PenaltyParams& rho);

}  // namespace mpct
