#pragma once

#include <optional>

#include "mpct/solver.hpp"

namespace mpct {

/// Reduced prediction gain w0 = w* - P dx. Only the rows of P that are
/// structurally nonzero are kept; z1 is recomputed by the first iteration.
///
/// Rows are expressed in the solver's dual sign convention
/// (lagrangian + <lambda, sum A_i z_i - b>).
struct WarmstartGain {
  MatrixXd P_z2;           // (n+m) x n
  MatrixXd P_z3_head;      // n x n, first n entries of z3
  MatrixXd P_lambda_head;  // 2n x n, lambda(0:n, 0) then lambda(0:n, 1)
  /// Largest |entry| among the discarded (non-z1) rows.
  double support_residual = 0.0;
  /// True when the KKT matrix was numerically singular and the
  /// minimum-norm least-squares solution was taken.
  bool singular_kkt = false;
  /// Full gain, rows ordered (z1, z2, z3, lambda) in stacked-vector form.
  /// Only kept when requested.
  std::optional<MatrixXd> full;

  std::size_t stored_scalar_count() const {
    return static_cast<std::size_t>(P_z2.size() + P_z3_head.size() +
                                    P_lambda_head.size());
  }
};

/// Builds the prediction gain from the Hessian of the (non-augmented)
/// Lagrangian. Throws kSupportViolation if any row outside the declared
/// support is numerically nonzero.
WarmstartGain compute_warmstart_gain(const ValidatedProblem& problem,
                                     bool keep_full = false);

/// Shifts the previous solution by -P (x_next - x_prev). z1 is left as is.
SolverState warmstart_predict(const SolveResult& prev,
                              const WarmstartGain& gain, const VectorXd& x_prev,
                              const VectorXd& x_next);

}  // namespace mpct
