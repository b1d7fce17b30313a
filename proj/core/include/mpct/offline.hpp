#pragma once

#include <cstddef>

#include "mpct/banded.hpp"
#include "mpct/problem.hpp"

namespace mpct {

/// Everything the online iteration reads. Immutable once built and safe to
/// share between concurrent solves.
///
/// Horizon-indexed quantities use the column-block layout: an (n+m) x (N+1)
/// matrix whose column j holds stage j.
struct OfflineData {
  int n = 0;
  int m = 0;
  int N = 0;

  // Prediction model and penalty, used matrix-free online.
  MatrixXd A;
  MatrixXd B;
  VectorXd rho0;
  VectorXd rho_s;
  MatrixXd rho_hat;
  MatrixXd T;
  MatrixXd S;

  MatrixXd H1_inv;  // (n+m) x (N+1)
  MatrixXd H3_inv;  // (n+m) x (N+1)
  MatrixXd M2;      // (n+m) x (n+m)
  BandedFactor factor;

  VectorXd z_lb, z_ub;            // stages 1..N-1
  VectorXd z_lb_s, z_ub_s;        // stage N (tightened)
  VectorXd u_only_lb, u_only_ub;  // stage 0 (states unbounded)

  /// compute_rho_upper_bound() of the costs this data was built from.
  double rho_upper_bound = 0.0;

  int nm() const { return n + m; }

  /// Number of stored scalars; affine in N.
  std::size_t stored_scalar_count() const;
};

/// Reciprocal diagonal of H1 = A1^T rho A1 in column-block layout.
MatrixXd compute_h1_inverse(const PenaltyParams& rho);

/// Reciprocal diagonal of H3 = diag(Q, R, ..., Q, R) + A3^T rho A3.
MatrixXd compute_h3_inverse(const CostWeights& costs, const PenaltyParams& rho);

/// Gain of the steady-state subproblem, z2 = M2 q2, with
/// M2 = H2^-1 G2^T (G2 H2^-1 G2^T)^-1 G2 H2^-1 - H2^-1 and G2 = [A - I, B].
/// Throws kRankDeficientG2 when G2 is numerically rank deficient.
MatrixXd compute_m2(const SystemModel& model, const CostWeights& costs,
                    const PenaltyParams& rho);

/// Block-tridiagonal Cholesky of W = G3 H3^-1 G3^T.
BandedFactor compute_banded_cholesky(const SystemModel& model,
                                     const MatrixXd& H3_inv, int N);

/// Builds all offline ingredients for a validated problem.
OfflineData build_offline(const ValidatedProblem& problem);

}  // namespace mpct
