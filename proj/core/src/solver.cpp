#include "mpct/solver.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <string>

namespace mpct {

namespace {

void check_state_dims(const SolverState& s, const OfflineData& d) {
  const int nm = d.nm();
  const int N = d.N;
  if (s.z1.rows() != nm || s.z1.cols() != N + 1 || s.z2.size() != nm ||
      s.z3.rows() != nm || s.z3.cols() != N + 1 || s.lambda.rows() != nm ||
      s.lambda.cols() != N + 3 || s.gamma.rows() != nm ||
      s.gamma.cols() != N + 3 || s.mu.rows() != d.n || s.mu.cols() != N ||
      s.q2.size() != nm || s.q3.rows() != nm || s.q3.cols() != N + 1) {
    throw MpctError(ErrorCode::kDimensionMismatch,
                    "solver state does not match the offline data");
  }
}

bool all_finite(const SolverState& s) {
  return s.z1.allFinite() && s.z2.allFinite() && s.z3.allFinite() &&
         s.lambda.allFinite();
}

}  // namespace

SolverState cold_start(int n, int m, int N) {
  const int nm = n + m;
  SolverState s;
  s.z1 = MatrixXd::Zero(nm, N + 1);
  s.z2 = VectorXd::Zero(nm);
  s.z3 = MatrixXd::Zero(nm, N + 1);
  s.lambda = MatrixXd::Zero(nm, N + 3);
  s.gamma = MatrixXd::Zero(nm, N + 3);
  s.mu = MatrixXd::Zero(n, N);
  s.q2 = VectorXd::Zero(nm);
  s.q3 = MatrixXd::Zero(nm, N + 1);
  return s;
}

void solve_qp1(SolverState& s, const OfflineData& d, const VectorXd& x) {
  const int n = d.n;
  const int N = d.N;
  const auto& rh = d.rho_hat;

  // Stage 0: the initial-state rows add rho0 * x on the state part.
  VectorXd v = rh.col(0).cwiseProduct(s.z2 + s.z3.col(0)) + s.lambda.col(1) -
               s.lambda.col(0);
  v.head(n) += d.rho0.cwiseProduct(x);
  s.z1.col(0) = v.cwiseProduct(d.H1_inv.col(0))
                    .cwiseMin(d.u_only_ub)
                    .cwiseMax(d.u_only_lb);

  for (int j = 1; j < N; ++j) {
    s.z1.col(j) = (rh.col(j).cwiseProduct(s.z2 + s.z3.col(j)) + s.lambda.col(j + 1))
                      .cwiseProduct(d.H1_inv.col(j))
                      .cwiseMin(d.z_ub)
                      .cwiseMax(d.z_lb);
  }

  s.z1.col(N) = (rh.col(N).cwiseProduct(s.z3.col(N)) +
                 (rh.col(N) + d.rho_s).cwiseProduct(s.z2) +
                 s.lambda.col(N + 1) + s.lambda.col(N + 2))
                    .cwiseProduct(d.H1_inv.col(N))
                    .cwiseMin(d.z_ub_s)
                    .cwiseMax(d.z_lb_s);
}

void solve_qp2(SolverState& s, const OfflineData& d, const VectorXd& r) {
  const int n = d.n;
  const int m = d.m;
  const int N = d.N;
  const auto& rh = d.rho_hat;

  s.q2.head(n).noalias() = -d.T * r.head(n);
  s.q2.tail(m).noalias() = -d.S * r.tail(m);
  s.q2 += rh.col(N).cwiseProduct(s.z3.col(N)) -
          (rh.col(N) + d.rho_s).cwiseProduct(s.z1.col(N)) +
          s.lambda.col(N + 1) + s.lambda.col(N + 2);
  for (int j = 0; j < N; ++j) {
    s.q2 += rh.col(j).cwiseProduct(s.z3.col(j) - s.z1.col(j)) + s.lambda.col(j + 1);
  }
  s.z2.noalias() = d.M2 * s.q2;
}

void solve_qp3(SolverState& s, const OfflineData& d) {
  const int n = d.n;
  const int m = d.m;
  const int N = d.N;
  const auto& rh = d.rho_hat;
  const auto& Hi = d.H3_inv;

  for (int j = 0; j <= N; ++j) {
    s.q3.col(j) = rh.col(j).cwiseProduct(s.z2 - s.z1.col(j)) + s.lambda.col(j + 1);
  }

  // Right-hand side -G3 H3^-1 q3, written straight into mu.
  for (int j = 0; j < N; ++j) {
    const VectorXd hq = Hi.col(j).cwiseProduct(s.q3.col(j));
    s.mu.col(j) = Hi.col(j + 1).head(n).cwiseProduct(s.q3.col(j + 1).head(n)) -
                  d.A * hq.head(n) - d.B * hq.tail(m);
  }
  banded_forward_backward(d.factor,
                          std::span<double>(s.mu.data(), s.mu.size()));

  // z3 = -H3^-1 (G3^T mu + q3)
  VectorXd t(n + m);
  for (int j = 0; j <= N; ++j) {
    t = s.q3.col(j);
    if (j < N) {
      t.head(n).noalias() += d.A.transpose() * s.mu.col(j);
      t.tail(m).noalias() += d.B.transpose() * s.mu.col(j);
    }
    if (j > 0) t.head(n) -= s.mu.col(j - 1);
    s.z3.col(j) = -Hi.col(j).cwiseProduct(t);
  }
}

double compute_residual(SolverState& s, const OfflineData& d, const VectorXd& x) {
  const int n = d.n;
  const int m = d.m;
  const int N = d.N;
  s.gamma.col(0).head(n) = s.z1.col(0).head(n) - x;
  s.gamma.col(0).tail(m).setZero();
  for (int j = 0; j <= N; ++j) {
    s.gamma.col(j + 1) = s.z2 + s.z3.col(j) - s.z1.col(j);
  }
  s.gamma.col(N + 2) = s.z2 - s.z1.col(N);
  return s.gamma.cwiseAbs().maxCoeff();
}

void update_duals(SolverState& s, const OfflineData& d) {
  const int n = d.n;
  const int N = d.N;
  s.lambda.col(0).head(n) += d.rho0.cwiseProduct(s.gamma.col(0).head(n));
  for (int j = 0; j <= N; ++j) {
    s.lambda.col(j + 1) += d.rho_hat.col(j).cwiseProduct(s.gamma.col(j + 1));
  }
  s.lambda.col(N + 2) += d.rho_s.cwiseProduct(s.gamma.col(N + 2));
}

double eadmm_iteration(SolverState& s, const OfflineData& d, const VectorXd& x,
                       const VectorXd& r) {
  solve_qp1(s, d, x);
  solve_qp2(s, d, r);
  solve_qp3(s, d);
  const double res = compute_residual(s, d, x);
  update_duals(s, d);
  ++s.iter;
  return res;
}

SolveResult eadmm_solve(const OfflineData& d, const SolverSettings& settings,
                        const VectorXd& x, const VectorXd& r,
                        SolverState initial) {
  check_state_dims(initial, d);
  if (x.size() != d.n || r.size() != d.nm()) {
    throw MpctError(ErrorCode::kDimensionMismatch,
                    "state or reference has the wrong size");
  }
  if (!x.allFinite() || !r.allFinite()) {
    throw MpctError(ErrorCode::kInvalidArgument,
                    "state and reference must be finite");
  }

  SolveResult out;
  out.state = std::move(initial);
  out.state.iter = 0;
  SolverState& s = out.state;

  double res = 0.0;
  bool converged = false;
  while (s.iter < settings.max_iter) {
    res = eadmm_iteration(s, d, x, r);
    if (!all_finite(s) || !std::isfinite(res)) {
      throw MpctError(ErrorCode::kNumericalBreakdown,
                      "non-finite iterate at iteration " + std::to_string(s.iter));
    }
    if (res <= settings.epsilon) {
      converged = true;
      break;
    }
  }

  out.iterations = s.iter;
  out.residual_inf = res;
  out.converged = converged;
  out.u0 = s.z1.col(0).tail(d.m);
  out.xs_us = s.z2;
  out.rho_above_bound =
      std::max({d.rho0.maxCoeff(), d.rho_s.maxCoeff(), d.rho_hat.maxCoeff()}) >
      d.rho_upper_bound;
  return out;
}

}  // namespace mpct
