#include "mpct/warmstart.hpp"

#include <algorithm>
#include <string>

namespace mpct {

namespace {

// [A1 A2 A3] of the coupling constraints, stacked-vector form.
MatrixXd coupling_matrix(int n, int m, int N) {
  const int nm = n + m;
  const int nz = (N + 1) * nm;
  const int mz = n + (N + 2) * nm;
  MatrixXd Az = MatrixXd::Zero(mz, 2 * nz + nm);
  Az.block(0, 0, n, n).setIdentity();
  for (int j = 0; j <= N; ++j) {
    const int row = n + j * nm;
    Az.block(row, j * nm, nm, nm) = -MatrixXd::Identity(nm, nm);
    Az.block(row, nz, nm, nm).setIdentity();
    Az.block(row, nz + nm + j * nm, nm, nm).setIdentity();
  }
  const int row = n + (N + 1) * nm;
  Az.block(row, N * nm, nm, nm) = -MatrixXd::Identity(nm, nm);
  Az.block(row, nz, nm, nm).setIdentity();
  return Az;
}

}  // namespace

WarmstartGain compute_warmstart_gain(const ValidatedProblem& problem,
                                     bool keep_full) {
  const int n = problem.n();
  const int m = problem.m();
  const int nm = n + m;
  const int N = problem.horizon();
  const int nz = (N + 1) * nm;
  const int nw = 2 * nz + nm;
  const int mz = n + (N + 2) * nm;
  const auto& costs = problem.costs();

  // Hessian of sum(theta_i) - <lambda, A z - b(x)> with respect to
  // w = (z1, z2, z3, lambda); theta1 = 0.
  MatrixXd K = MatrixXd::Zero(nw + mz, nw + mz);
  K.block(nz, nz, n, n) = costs.T;
  K.block(nz + n, nz + n, m, m) = costs.S;
  for (int j = 0; j <= N; ++j) {
    const int off = nz + nm + j * nm;
    K.diagonal().segment(off, n) = costs.Q_diag;
    K.diagonal().segment(off + n, m) = costs.R_diag;
  }
  const MatrixXd Az = coupling_matrix(n, m, N);
  K.topRightCorner(nw, mz) = -Az.transpose();
  K.bottomLeftCorner(mz, nw) = -Az;

  // d/dx of the gradient: b(x) = [x; 0], entering through the lambda rows.
  MatrixXd rhs = MatrixXd::Zero(nw + mz, n);
  rhs.block(nw, 0, n, n).setIdentity();

  Eigen::BDCSVD<MatrixXd> svd(K, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(1e-10);
  MatrixXd P = svd.solve(rhs);

  // The solver uses + <lambda, .>, so its multipliers are the negatives of
  // the ones above.
  P.bottomRows(mz) *= -1.0;

  WarmstartGain gain;
  gain.singular_kkt = svd.rank() < K.rows();
  gain.P_z2 = P.block(nz, 0, nm, n);
  gain.P_z3_head = P.block(nz + nm, 0, n, n);
  gain.P_lambda_head = P.block(nw, 0, 2 * n, n);

  double off_support = 0.0;
  off_support = std::max(off_support,
                         P.block(nz + nm + n, 0, nz - n, n).cwiseAbs().maxCoeff());
  off_support = std::max(off_support,
                         P.block(nw + 2 * n, 0, mz - 2 * n, n).cwiseAbs().maxCoeff());
  gain.support_residual = off_support;

  const double scale = std::max(1.0, P.cwiseAbs().maxCoeff());
  if (!(off_support <= 1e-9 * scale)) {
    throw MpctError(ErrorCode::kSupportViolation,
                    "prediction gain has nonzero rows outside z2, z3 head and "
                    "the leading dual blocks (max " +
                        std::to_string(off_support) + ")");
  }
  if (keep_full) gain.full = std::move(P);
  return gain;
}

SolverState warmstart_predict(const SolveResult& prev, const WarmstartGain& gain,
                              const VectorXd& x_prev, const VectorXd& x_next) {
  const Eigen::Index n = gain.P_z3_head.rows();
  if (x_prev.size() != n || x_next.size() != n ||
      prev.state.z2.size() != gain.P_z2.rows() || prev.state.z3.rows() < n ||
      prev.state.lambda.cols() < 2) {
    throw MpctError(ErrorCode::kDimensionMismatch,
                    "warmstart gain does not match the state");
  }
  SolverState s = prev.state;
  s.iter = 0;
  const VectorXd dx = x_next - x_prev;
  s.z2.noalias() -= gain.P_z2 * dx;
  s.z3.col(0).head(n).noalias() -= gain.P_z3_head * dx;
  const VectorXd dl = gain.P_lambda_head * dx;
  s.lambda.col(0).head(n) -= dl.head(n);
  s.lambda.col(1).head(n) -= dl.tail(n);
  return s;
}

}  // namespace mpct
