#include "mpct/offline.hpp"

#include <vector>

namespace mpct {

std::size_t OfflineData::stored_scalar_count() const {
  auto sz = [](const auto& M) { return static_cast<std::size_t>(M.size()); };
  return sz(A) + sz(B) + sz(rho0) + sz(rho_s) + sz(rho_hat) + sz(T) + sz(S) +
         sz(H1_inv) + sz(H3_inv) + sz(M2) + factor.stored_scalar_count() +
         sz(z_lb) + sz(z_ub) + sz(z_lb_s) + sz(z_ub_s) + sz(u_only_lb) +
         sz(u_only_ub) + 1;
}

MatrixXd compute_h1_inverse(const PenaltyParams& rho) {
  const Eigen::Index n = rho.rho0.size();
  const Eigen::Index N = rho.rho_hat.cols() - 1;
  MatrixXd diag = rho.rho_hat;
  diag.col(0).head(n) += rho.rho0;
  diag.col(N) += rho.rho_s;
  return diag.cwiseInverse();
}

MatrixXd compute_h3_inverse(const CostWeights& costs, const PenaltyParams& rho) {
  VectorXd qr(costs.Q_diag.size() + costs.R_diag.size());
  qr << costs.Q_diag, costs.R_diag;
  return (rho.rho_hat.colwise() + qr).cwiseInverse();
}

MatrixXd compute_m2(const SystemModel& model, const CostWeights& costs,
                    const PenaltyParams& rho) {
  const int n = model.n();
  const int m = model.m();

  MatrixXd H2 = MatrixXd::Zero(n + m, n + m);
  H2.topLeftCorner(n, n) = costs.T;
  H2.bottomRightCorner(m, m) = costs.S;
  H2.diagonal() += rho.rho_hat.rowwise().sum() + rho.rho_s;

  MatrixXd G2(n, n + m);
  G2 << model.A - MatrixXd::Identity(n, n), model.B;

  Eigen::JacobiSVD<MatrixXd> svd(G2);
  const auto& sv = svd.singularValues();
  if (sv.size() < n || sv(n - 1) <= 1e-10 * sv(0)) {
    throw MpctError(ErrorCode::kRankDeficientG2,
                    "[A - I, B] is not of full row rank");
  }

  Eigen::LLT<MatrixXd> h2(H2);
  if (h2.info() != Eigen::Success) {
    throw MpctError(ErrorCode::kFactorizationFailure, "H2 is not positive definite");
  }
  const MatrixXd H2inv = h2.solve(MatrixXd::Identity(n + m, n + m));
  const MatrixXd H2invG2t = H2inv * G2.transpose();
  const MatrixXd W2 = G2 * H2invG2t;

  Eigen::JacobiSVD<MatrixXd> wsvd(W2);
  const auto& wsv = wsvd.singularValues();
  if (wsv(n - 1) <= 1e-10 * wsv(0)) {
    throw MpctError(ErrorCode::kRankDeficientG2,
                    "G2 H2^-1 G2^T is numerically singular");
  }
  Eigen::LDLT<MatrixXd> w2(W2);
  MatrixXd M2 = H2invG2t * w2.solve(H2invG2t.transpose()) - H2inv;
  return 0.5 * (M2 + M2.transpose());
}

BandedFactor compute_banded_cholesky(const SystemModel& model,
                                     const MatrixXd& H3_inv, int N) {
  if (N < 2) {
    throw MpctError(ErrorCode::kHorizonTooShort, "banded factor needs N >= 2");
  }
  const int n = model.n();
  const int m = model.m();
  if (H3_inv.rows() != n + m || H3_inv.cols() != N + 1) {
    throw MpctError(ErrorCode::kDimensionMismatch, "H3_inv has the wrong shape");
  }
  MatrixXd AB(n, n + m);
  AB << model.A, model.B;

  // Block row k of G3 is [A B] on stage k and [-I 0] on stage k+1.
  std::vector<MatrixXd> diag(N), upper(N - 1);
  for (int k = 0; k < N; ++k) {
    diag[k] = AB * H3_inv.col(k).asDiagonal() * AB.transpose();
    diag[k].diagonal() += H3_inv.col(k + 1).head(n);
    if (k + 1 < N) {
      upper[k] = -(H3_inv.col(k + 1).head(n).asDiagonal() * model.A.transpose());
    }
  }
  return factor_block_tridiagonal(diag, upper);
}

OfflineData build_offline(const ValidatedProblem& problem) {
  const SystemModel& model = problem.model();
  const int n = problem.n();
  const int m = problem.m();
  const int N = problem.horizon();
  const double big = problem.config().big_bound;

  OfflineData d;
  d.n = n;
  d.m = m;
  d.N = N;
  d.A = model.A;
  d.B = model.B;
  d.rho0 = problem.rho().rho0;
  d.rho_s = problem.rho().rho_s;
  d.rho_hat = problem.rho().rho_hat;
  d.T = problem.costs().T;
  d.S = problem.costs().S;

  d.H1_inv = compute_h1_inverse(problem.rho());
  d.H3_inv = compute_h3_inverse(problem.costs(), problem.rho());
  d.M2 = compute_m2(model, problem.costs(), problem.rho());
  d.factor = compute_banded_cholesky(model, d.H3_inv, N);

  d.z_lb.resize(n + m);
  d.z_ub.resize(n + m);
  d.z_lb << model.x_lb, model.u_lb;
  d.z_ub << model.x_ub, model.u_ub;
  d.z_lb_s.resize(n + m);
  d.z_ub_s.resize(n + m);
  d.z_lb_s << model.x_lb + model.eps_x, model.u_lb + model.eps_u;
  d.z_ub_s << model.x_ub - model.eps_x, model.u_ub - model.eps_u;
  d.u_only_lb.resize(n + m);
  d.u_only_ub.resize(n + m);
  d.u_only_lb << VectorXd::Constant(n, -big), model.u_lb;
  d.u_only_ub << VectorXd::Constant(n, big), model.u_ub;
  d.rho_upper_bound = compute_rho_upper_bound(problem.costs());
  return d;
}

}  // namespace mpct
