#include "mpct/oracle.hpp"

#include <algorithm>
#include <cmath>

namespace mpct::oracle {

namespace {

double stationarity(const VectorXd& grad, const MatrixXd& G) {
  // Best multipliers for the equality constraints in the least-squares sense.
  Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(G.transpose());
  const VectorXd nu = cod.solve(-grad);
  return (grad + G.transpose() * nu).cwiseAbs().maxCoeff();
}

}  // namespace

// W mu = -G H^-1 q, z = -H^-1 (G' mu + q).
VectorXd solve_equality_qp(const MatrixXd& H, const VectorXd& q,
                           const MatrixXd& G) {
  Eigen::LLT<MatrixXd> h(H);
  if (h.info() != Eigen::Success) {
    throw MpctError(ErrorCode::kSingularKkt, "subproblem Hessian is not PD");
  }
  const MatrixXd HiGt = h.solve(G.transpose());
  const VectorXd Hiq = h.solve(q);
  const MatrixXd W = G * HiGt;
  Eigen::LLT<MatrixXd> w(W);
  if (w.info() != Eigen::Success || w.rcond() < 1e-14) {
    throw MpctError(ErrorCode::kSingularKkt, "G H^-1 G' is not PD");
  }
  const VectorXd mu = w.solve(-(G * Hiq));
  return -(HiGt * mu + Hiq);
}

DenseExtendedProblem assemble_dense(const ValidatedProblem& problem,
                                    const VectorXd& x, const VectorXd& r) {
  const SystemModel& model = problem.model();
  const CostWeights& costs = problem.costs();
  const PenaltyParams& rho = problem.rho();
  const int n = problem.n();
  const int m = problem.m();
  const int nm = n + m;
  const int N = problem.horizon();
  const int nz = (N + 1) * nm;

  DenseExtendedProblem p;
  p.n = n;
  p.m = m;
  p.N = N;
  p.mz = n + (N + 2) * nm;
  const int mz = p.mz;

  p.A1 = MatrixXd::Zero(mz, nz);
  p.A2 = MatrixXd::Zero(mz, nm);
  p.A3 = MatrixXd::Zero(mz, nz);
  p.b = VectorXd::Zero(mz);
  p.rho_full = VectorXd::Zero(mz);

  // x_0 = x
  for (int i = 0; i < n; ++i) {
    p.A1(i, i) = 1.0;
    p.b(i) = x(i);
    p.rho_full(i) = rho.rho0(i);
  }
  // z3_j + z2 - z1_j = 0, j = 0..N
  for (int j = 0; j <= N; ++j) {
    for (int i = 0; i < nm; ++i) {
      const int row = n + j * nm + i;
      p.A1(row, j * nm + i) = -1.0;
      p.A2(row, i) = 1.0;
      p.A3(row, j * nm + i) = 1.0;
      p.rho_full(row) = rho.rho_hat(i, j);
    }
  }
  // (x_N, u_N) = (x_s, u_s)
  for (int i = 0; i < nm; ++i) {
    const int row = n + (N + 1) * nm + i;
    p.A1(row, N * nm + i) = -1.0;
    p.A2(row, i) = 1.0;
    p.rho_full(row) = rho.rho_s(i);
  }

  p.TS = MatrixXd::Zero(nm, nm);
  p.TS.topLeftCorner(n, n) = costs.T;
  p.TS.bottomRightCorner(m, m) = costs.S;
  p.QR_full.resize(nz);
  for (int j = 0; j <= N; ++j) {
    p.QR_full.segment(j * nm, n) = costs.Q_diag;
    p.QR_full.segment(j * nm + n, m) = costs.R_diag;
  }
  p.r = r;

  const auto R = p.rho_full.asDiagonal();
  p.H1 = p.A1.transpose() * R * p.A1;
  p.H2 = p.TS + p.A2.transpose() * R * p.A2;
  p.H3 = MatrixXd(p.QR_full.asDiagonal()) + p.A3.transpose() * R * p.A3;

  p.G2.resize(n, nm);
  p.G2 << model.A - MatrixXd::Identity(n, n), model.B;
  p.G3 = MatrixXd::Zero(N * n, nz);
  for (int j = 0; j < N; ++j) {
    p.G3.block(j * n, j * nm, n, n) = model.A;
    p.G3.block(j * n, j * nm + n, n, m) = model.B;
    p.G3.block(j * n, (j + 1) * nm, n, n) = -MatrixXd::Identity(n, n);
  }

  const double big = problem.config().big_bound;
  p.z1_lb.resize(nz);
  p.z1_ub.resize(nz);
  for (int j = 0; j <= N; ++j) {
    VectorXd lo(nm), hi(nm);
    if (j == 0) {
      lo << VectorXd::Constant(n, -big), model.u_lb;
      hi << VectorXd::Constant(n, big), model.u_ub;
    } else if (j == N) {
      lo << model.x_lb + model.eps_x, model.u_lb + model.eps_u;
      hi << model.x_ub - model.eps_x, model.u_ub - model.eps_u;
    } else {
      lo << model.x_lb, model.u_lb;
      hi << model.x_ub, model.u_ub;
    }
    p.z1_lb.segment(j * nm, nm) = lo;
    p.z1_ub.segment(j * nm, nm) = hi;
  }
  return p;
}

DenseIterate dense_eadmm_step(const DenseExtendedProblem& p,
                              const DenseIterate& it) {
  const auto R = p.rho_full.asDiagonal();
  DenseIterate out;

  const VectorXd q1 = p.A1.transpose() * (R * (p.A2 * it.z2 + p.A3 * it.z3 - p.b)) +
                      p.A1.transpose() * it.lambda;
  out.z1 = (-q1.array() / p.H1.diagonal().array())
               .matrix()
               .cwiseMin(p.z1_ub)
               .cwiseMax(p.z1_lb);

  const VectorXd q2 = -p.TS * p.r +
                      p.A2.transpose() * (R * (p.A1 * out.z1 + p.A3 * it.z3 - p.b)) +
                      p.A2.transpose() * it.lambda;
  out.z2 = solve_equality_qp(p.H2, q2, p.G2);

  const VectorXd q3 = p.A3.transpose() * (R * (p.A1 * out.z1 + p.A2 * out.z2 - p.b)) +
                      p.A3.transpose() * it.lambda;
  out.z3 = solve_equality_qp(p.H3, q3, p.G3);

  out.gamma = p.A1 * out.z1 + p.A2 * out.z2 + p.A3 * out.z3 - p.b;
  out.lambda = it.lambda + R * out.gamma;
  return out;
}

double kkt_residual(const DenseExtendedProblem& p, const VectorXd& z1,
                    const VectorXd& z2, const VectorXd& z3,
                    const VectorXd& lambda) {
  double res = (p.A1 * z1 + p.A2 * z2 + p.A3 * z3 - p.b).cwiseAbs().maxCoeff();
  res = std::max(res, (p.G2 * z2).cwiseAbs().maxCoeff());
  res = std::max(res, (p.G3 * z3).cwiseAbs().maxCoeff());

  const VectorXd g2 = p.TS * z2 - p.TS * p.r + p.A2.transpose() * lambda;
  res = std::max(res, stationarity(g2, p.G2));
  const VectorXd g3 = p.QR_full.cwiseProduct(z3) + p.A3.transpose() * lambda;
  res = std::max(res, stationarity(g3, p.G3));

  const VectorXd g1 = p.A1.transpose() * lambda;
  constexpr double kFaceTol = 1e-9;
  for (Eigen::Index i = 0; i < z1.size(); ++i) {
    if (z1(i) > p.z1_lb(i) + kFaceTol && z1(i) < p.z1_ub(i) - kFaceTol) {
      res = std::max(res, std::abs(g1(i)));
    }
  }
  return res;
}

OriginalSolution map_to_original(int n, int m, const MatrixXd& z1,
                                 const VectorXd& z2, const MatrixXd& z3) {
  const Eigen::Index N = z1.cols() - 1;
  OriginalSolution out;
  out.x_traj = z1.topRows(n);
  out.u_traj = z1.bottomRows(m).leftCols(N);
  out.xs = z2.head(n);
  out.us = z2.tail(m);
  out.congruence_err = (z3.colwise() + z2 - z1).cwiseAbs().maxCoeff();
  return out;
}

DenseIterate to_dense(const SolverState& s, int n) {
  const Eigen::Index nm = s.z1.rows();
  const Eigen::Index cols = s.lambda.cols();
  DenseIterate it;
  it.z1 = Eigen::Map<const VectorXd>(s.z1.data(), s.z1.size());
  it.z2 = s.z2;
  it.z3 = Eigen::Map<const VectorXd>(s.z3.data(), s.z3.size());
  it.lambda.resize(n + (cols - 1) * nm);
  it.gamma.resize(n + (cols - 1) * nm);
  it.lambda.head(n) = s.lambda.col(0).head(n);
  it.gamma.head(n) = s.gamma.col(0).head(n);
  it.lambda.tail((cols - 1) * nm) =
      Eigen::Map<const VectorXd>(s.lambda.col(1).data(), (cols - 1) * nm);
  it.gamma.tail((cols - 1) * nm) =
      Eigen::Map<const VectorXd>(s.gamma.col(1).data(), (cols - 1) * nm);
  return it;
}

SolverState from_dense(const DenseIterate& it, int n, int m, int N) {
  const int nm = n + m;
  SolverState s = cold_start(n, m, N);
  s.z1 = Eigen::Map<const MatrixXd>(it.z1.data(), nm, N + 1);
  s.z2 = it.z2;
  s.z3 = Eigen::Map<const MatrixXd>(it.z3.data(), nm, N + 1);
  s.lambda.col(0).head(n) = it.lambda.head(n);
  s.lambda.rightCols(N + 2) =
      Eigen::Map<const MatrixXd>(it.lambda.data() + n, nm, N + 2);
  if (it.gamma.size() == it.lambda.size()) {
    s.gamma.col(0).head(n) = it.gamma.head(n);
    s.gamma.rightCols(N + 2) =
        Eigen::Map<const MatrixXd>(it.gamma.data() + n, nm, N + 2);
  }
  return s;
}

double max_abs_deviation(const DenseIterate& a, const DenseIterate& b) {
  return std::max({(a.z1 - b.z1).cwiseAbs().maxCoeff(),
                   (a.z2 - b.z2).cwiseAbs().maxCoeff(),
                   (a.z3 - b.z3).cwiseAbs().maxCoeff(),
                   (a.lambda - b.lambda).cwiseAbs().maxCoeff()});
}

}  // namespace mpct::oracle
