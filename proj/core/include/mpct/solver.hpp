#pragma once

#include "mpct/offline.hpp"

namespace mpct {

/// Online iterates of the sparse solver, all in column-block layout.
///
/// lambda and gamma have N+3 columns: column 0 is the initial-state
/// constraint (its last m rows are padding and stay zero), columns 1..N+1 the
/// congruence constraints of steps 0..N, column N+2 the terminal constraint.
struct SolverState {
  MatrixXd z1;      // (n+m) x (N+1)
  VectorXd z2;      // (x_s, u_s)
  MatrixXd z3;      // (n+m) x (N+1)
  MatrixXd lambda;  // (n+m) x (N+3)
  MatrixXd gamma;   // (n+m) x (N+3)
  MatrixXd mu;      // n x N
  VectorXd q2;
  MatrixXd q3;  // (n+m) x (N+1)
  int iter = 0;

  bool operator==(const SolverState&) const = default;
};

struct SolverSettings {
  double epsilon = 1e-4;
  int max_iter = kDefaultMaxIter;
};

struct SolveResult {
  SolverState state;
  int iterations = 0;
  double residual_inf = 0.0;
  bool converged = false;
  VectorXd u0;     // first input to apply
  VectorXd xs_us;  // artificial reference at exit
  /// Set when some penalty exceeds the guaranteed-convergence bound.
  bool rho_above_bound = false;
};

/// All-zero state.
SolverState cold_start(int n, int m, int N);

/// z1 update: componentwise clip of the unconstrained minimizer.
void solve_qp1(SolverState& state, const OfflineData& offline,
               const VectorXd& x);

/// z2 update: matrix-free q2 followed by z2 = M2 q2.
void solve_qp2(SolverState& state, const OfflineData& offline,
               const VectorXd& r);

/// z3 update through the banded Schur complement.
void solve_qp3(SolverState& state, const OfflineData& offline);

/// Fills state.gamma with the equality residual and returns its inf-norm.
double compute_residual(SolverState& state, const OfflineData& offline,
                        const VectorXd& x);

/// lambda += rho * gamma, componentwise.
void update_duals(SolverState& state, const OfflineData& offline);

/// One full iteration (z1, z2, z3, residual, duals). Returns the residual.
double eadmm_iteration(SolverState& state, const OfflineData& offline,
                       const VectorXd& x, const VectorXd& r);

/// Runs iterations from `initial` until the residual inf-norm drops to
/// settings.epsilon or settings.max_iter is reached. Throws
/// kNumericalBreakdown if any iterate becomes non-finite.
SolveResult eadmm_solve(const OfflineData& offline,
                        const SolverSettings& settings, const VectorXd& x,
                        const VectorXd& r, SolverState initial);

}  // namespace mpct
