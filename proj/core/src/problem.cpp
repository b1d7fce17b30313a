#include "mpct/problem.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mpct {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kNonPositiveWeight: return "NonPositiveWeight";
    case ErrorCode::kEmptyBox: return "EmptyBox";
    case ErrorCode::kHorizonTooShort: return "HorizonTooShort";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kRankDeficientG2: return "RankDeficientG2";
    case ErrorCode::kFactorizationFailure: return "FactorizationFailure";
    case ErrorCode::kSupportViolation: return "SupportViolation";
    case ErrorCode::kSingularKkt: return "SingularKkt";
    case ErrorCode::kNumericalBreakdown: return "NumericalBreakdown";
    case ErrorCode::kSingularConfiguration: return "SingularConfiguration";
  }
  return "Unknown";
}

namespace {

void expect_size(const char* name, Eigen::Index actual, Eigen::Index expected) {
  if (actual != expected) {
    throw MpctError(ErrorCode::kDimensionMismatch,
                    std::string(name) + " has size " + std::to_string(actual) +
                        ", expected " + std::to_string(expected));
  }
}

void expect_shape(const char* name, const MatrixXd& M, Eigen::Index rows,
                  Eigen::Index cols) {
  if (M.rows() != rows || M.cols() != cols) {
    throw MpctError(ErrorCode::kDimensionMismatch,
                    std::string(name) + " is " + std::to_string(M.rows()) +
                        "x" + std::to_string(M.cols()) + ", expected " +
                        std::to_string(rows) + "x" + std::to_string(cols));
  }
}

template <typename Derived>
void expect_finite(const char* name, const Eigen::MatrixBase<Derived>& M) {
  if (!M.allFinite()) {
    throw MpctError(ErrorCode::kInvalidArgument,
                    std::string(name) + " has non-finite entries");
  }
}

template <typename Derived>
void expect_positive(const char* name, const Eigen::MatrixBase<Derived>& M) {
  expect_finite(name, M);
  if (M.size() > 0 && !(M.array() > 0.0).all()) {
    throw MpctError(ErrorCode::kNonPositiveWeight,
                    std::string(name) + " must be strictly positive");
  }
}

void expect_spd(const char* name, const MatrixXd& M) {
  expect_finite(name, M);
  const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
  if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw MpctError(ErrorCode::kNonPositiveWeight,
                    std::string(name) + " is not symmetric");
  }
  Eigen::LLT<MatrixXd> llt(M);
  if (llt.info() != Eigen::Success) {
    throw MpctError(ErrorCode::kNonPositiveWeight,
                    std::string(name) + " is not positive definite");
  }
}

void expect_box(const char* name, const VectorXd& lb, const VectorXd& ub,
                const VectorXd& eps) {
  expect_finite(name, lb);
  expect_finite(name, ub);
  for (Eigen::Index i = 0; i < lb.size(); ++i) {
    if (!(lb[i] < ub[i])) {
      throw MpctError(ErrorCode::kEmptyBox, std::string(name) + " component " +
                                                std::to_string(i) +
                                                " has lower >= upper");
    }
    if (!(lb[i] + eps[i] < ub[i] - eps[i])) {
      throw MpctError(ErrorCode::kEmptyBox,
                      std::string(name) + " component " + std::to_string(i) +
                          " is empty after tightening");
    }
  }
}

}  // namespace

ValidatedProblem validate_problem(SystemModel model, CostWeights costs,
                                  MpctConfig config, PenaltyParams rho) {
  const Eigen::Index n = model.A.rows();
  const Eigen::Index m = model.B.cols();
  if (n == 0 || m == 0) {
    throw MpctError(ErrorCode::kDimensionMismatch,
                    "state and input dimensions must be positive");
  }
  if (config.N < 2) {
    throw MpctError(ErrorCode::kHorizonTooShort,
                    "horizon N = " + std::to_string(config.N) +
                        " is below the minimum of 2");
  }
  if (!(config.epsilon > 0.0) || !std::isfinite(config.epsilon)) {
    throw MpctError(ErrorCode::kInvalidArgument, "epsilon must be positive");
  }
  if (config.max_iter < 1) {
    throw MpctError(ErrorCode::kInvalidArgument, "max_iter must be >= 1");
  }
  if (!(config.big_bound > 0.0) || !std::isfinite(config.big_bound)) {
    throw MpctError(ErrorCode::kInvalidArgument, "big_bound must be positive");
  }

  expect_shape("A", model.A, n, n);
  expect_shape("B", model.B, n, m);
  expect_finite("A", model.A);
  expect_finite("B", model.B);
  expect_size("x_lb", model.x_lb.size(), n);
  expect_size("x_ub", model.x_ub.size(), n);
  expect_size("u_lb", model.u_lb.size(), m);
  expect_size("u_ub", model.u_ub.size(), m);
  if (model.eps_x.size() == 0) model.eps_x = VectorXd::Constant(n, kDefaultTightening);
  if (model.eps_u.size() == 0) model.eps_u = VectorXd::Constant(m, kDefaultTightening);
  expect_size("eps_x", model.eps_x.size(), n);
  expect_size("eps_u", model.eps_u.size(), m);
  expect_finite("eps_x", model.eps_x);
  expect_finite("eps_u", model.eps_u);
  if ((model.eps_x.array() < 0.0).any() || (model.eps_u.array() < 0.0).any()) {
    throw MpctError(ErrorCode::kInvalidArgument,
                    "tightening margins must be non-negative");
  }
  expect_box("state bounds", model.x_lb, model.x_ub, model.eps_x);
  expect_box("input bounds", model.u_lb, model.u_ub, model.eps_u);

  expect_size("Q_diag", costs.Q_diag.size(), n);
  expect_size("R_diag", costs.R_diag.size(), m);
  expect_shape("T", costs.T, n, n);
  expect_shape("S", costs.S, m, m);
  expect_positive("Q_diag", costs.Q_diag);
  expect_positive("R_diag", costs.R_diag);
  expect_spd("T", costs.T);
  expect_spd("S", costs.S);

  expect_size("rho0", rho.rho0.size(), n);
  expect_size("rho_s", rho.rho_s.size(), n + m);
  expect_shape("rho_hat", rho.rho_hat, n + m, config.N + 1);
  expect_positive("rho0", rho.rho0);
  expect_positive("rho_s", rho.rho_s);
  expect_positive("rho_hat", rho.rho_hat);

  ValidatedProblem out;
  out.model_ = std::move(model);
  out.costs_ = std::move(costs);
  out.config_ = config;
  out.rho_ = std::move(rho);
  return out;
}

PenaltyParams build_rho(const SystemModel& model, const MpctConfig& config,
                        double rho_base, double rho_boosted,
                        BoostPattern pattern) {
  if (!(rho_base > 0.0) || !(rho_boosted > 0.0) || !std::isfinite(rho_base) ||
      !std::isfinite(rho_boosted)) {
    throw MpctError(ErrorCode::kNonPositiveWeight,
                    "penalty values must be positive and finite");
  }
  if (config.N < 2) {
    throw MpctError(ErrorCode::kHorizonTooShort, "horizon must be >= 2");
  }
  const int n = model.n();
  const int m = model.m();
  const int N = config.N;

  PenaltyParams rho;
  rho.rho0 = VectorXd::Constant(n, rho_boosted);
  rho.rho_s = VectorXd::Constant(n + m, rho_boosted);
  rho.rho_hat = MatrixXd::Constant(n + m, N + 1, rho_base);
  rho.rho_hat.col(N).setConstant(rho_boosted);
  switch (pattern) {
    case BoostPattern::kConstraintList:
      // x-congruence at step 0; x- and u-congruence at step N.
      rho.rho_hat.col(0).head(n).setConstant(rho_boosted);
      break;
    case BoostPattern::kWholeColumn:
      rho.rho_hat.col(0).setConstant(rho_boosted);
      break;
  }
  return rho;
}

PenaltyParams uniform_rho(int n, int m, int N, double rho) {
  if (!(rho > 0.0) || !std::isfinite(rho)) {
    throw MpctError(ErrorCode::kNonPositiveWeight, "rho must be positive");
  }
  return PenaltyParams{VectorXd::Constant(n, rho), VectorXd::Constant(n + m, rho),
                       MatrixXd::Constant(n + m, N + 1, rho)};
}

double compute_rho_upper_bound(const CostWeights& costs) {
  // ||A3^T A3|| = 1, so the bound only depends on the smallest stage weight.
  const double mu3 = std::min(costs.Q_diag.minCoeff(), costs.R_diag.minCoeff());
  return 6.0 * mu3 / 17.0;
}

double max_penalty(const PenaltyParams& rho) {
  return std::max({rho.rho0.maxCoeff(), rho.rho_s.maxCoeff(),
                   rho.rho_hat.maxCoeff()});
}

}  // namespace mpct
