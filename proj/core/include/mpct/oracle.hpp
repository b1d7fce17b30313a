#pragma once

#include "mpct/solver.hpp"

namespace mpct::oracle {

/// Explicit dense form of the three-block problem
///   min theta1(z1) + theta2(z2) + theta3(z3)
///   s.t. A1 z1 + A2 z2 + A3 z3 = b,  z1 in box,  G2 z2 = 0,  G3 z3 = 0.
/// Built naively so that it shares no code path with the sparse solver.
struct DenseExtendedProblem {
  int n = 0, m = 0, N = 0;
  int mz = 0;  // number of coupling equality rows

  MatrixXd A1, A2, A3;
  VectorXd b;
  VectorXd rho_full;  // diagonal penalty, one entry per coupling row

  MatrixXd H1, H2, H3;  // subproblem Hessians
  MatrixXd G2, G3;
  MatrixXd TS;       // diag(T, S)
  VectorXd QR_full;  // diag(Q, R, ..., Q, R)
  VectorXd r;        // (x_r, u_r)

  VectorXd z1_lb, z1_ub;
};

/// Stacked-vector iterate. lambda has mz entries (no padding).
struct DenseIterate {
  VectorXd z1, z2, z3, lambda;
  VectorXd gamma;
};

DenseExtendedProblem assemble_dense(const ValidatedProblem& problem,
                                    const VectorXd& x, const VectorXd& r);

/// Minimizer of 1/2 z'Hz + q'z subject to G z = 0. Throws kSingularKkt if H
/// or G H^-1 G' is not positive definite.
VectorXd solve_equality_qp(const MatrixXd& H, const VectorXd& q,
                           const MatrixXd& G);

/// One iteration of the generic three-block method with dense algebra.
/// Throws kSingularKkt if a subproblem KKT system cannot be factorized.
DenseIterate dense_eadmm_step(const DenseExtendedProblem& problem,
                              const DenseIterate& iterate);

/// Max of: coupling residual, G2 z2, G3 z3, and Lagrangian stationarity of
/// each block (least-squares multipliers for the G constraints; z1 entries
/// only counted when strictly inside their box).
double kkt_residual(const DenseExtendedProblem& problem, const VectorXd& z1,
                    const VectorXd& z2, const VectorXd& z3,
                    const VectorXd& lambda);

struct OriginalSolution {
  MatrixXd x_traj;  // n x (N+1)
  MatrixXd u_traj;  // m x N
  VectorXd xs, us;
  double congruence_err = 0.0;
};

OriginalSolution map_to_original(int n, int m, const MatrixXd& z1,
                                 const VectorXd& z2, const MatrixXd& z3);

/// Layout conversions between the sparse state and stacked vectors.
DenseIterate to_dense(const SolverState& state, int n);
SolverState from_dense(const DenseIterate& it, int n, int m, int N);

/// Largest absolute difference over z1, z2, z3, lambda.
double max_abs_deviation(const DenseIterate& a, const DenseIterate& b);

}  // namespace mpct::oracle
