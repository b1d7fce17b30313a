#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace mpct {

/// Upper block-bidiagonal Cholesky factor Wc of a symmetric positive definite
/// block-tridiagonal matrix W = Wc^T Wc:
///
///   Wc = [ beta_0  alpha_0                    ]
///        [         beta_1  alpha_1            ]
///        [                  ...     alpha_{K-2}]
///        [                          beta_{K-1} ]
///
/// Each beta_k is upper triangular. Only its upper triangle is stored,
/// row-major and packed, with the diagonal replaced by its reciprocal so the
/// substitutions below need no divisions. alpha_k blocks are stored dense,
/// row-major.
class BandedFactor {
 public:
  BandedFactor() = default;
  BandedFactor(int block_size, int num_blocks);

  int block_size() const { return n_; }
  int num_blocks() const { return blocks_; }

  /// alpha_k(i, j) for k in [0, num_blocks - 1).
  double alpha(int k, int i, int j) const {
    return alpha_[static_cast<std::size_t>(k) * n_ * n_ + i * n_ + j];
  }
  double& alpha(int k, int i, int j) {
    return alpha_[static_cast<std::size_t>(k) * n_ * n_ + i * n_ + j];
  }

  /// beta_hat_k(i, j) for i <= j. The diagonal holds 1 / beta_k(i, i).
  double beta_hat(int k, int i, int j) const {
    return beta_hat_[static_cast<std::size_t>(k) * tri_ + packed(i, j)];
  }
  double& beta_hat(int k, int i, int j) {
    return beta_hat_[static_cast<std::size_t>(k) * tri_ + packed(i, j)];
  }

  std::span<const double> alpha_data() const { return alpha_; }
  std::span<const double> beta_hat_data() const { return beta_hat_; }
  std::span<double> alpha_data() { return alpha_; }
  std::span<double> beta_hat_data() { return beta_hat_; }

  /// Dense alpha_k / beta_k (with the true diagonal), for checks and tests.
  Eigen::MatrixXd alpha_block(int k) const;
  Eigen::MatrixXd beta_block(int k) const;

  /// The full upper-triangular factor Wc, dense.
  Eigen::MatrixXd dense_factor() const;

  std::size_t stored_scalar_count() const {
    return alpha_.size() + beta_hat_.size();
  }

 private:
  int packed(int i, int j) const { return i * n_ - i * (i - 1) / 2 + (j - i); }

  int n_ = 0;
  int blocks_ = 0;
  int tri_ = 0;
  std::vector<double> alpha_;
  std::vector<double> beta_hat_;
};

/// Factorizes the block-tridiagonal SPD matrix with diagonal blocks
/// `diag[k]` and super-diagonal blocks `upper[k]` (block (k, k+1)):
///   beta_0^T beta_0 = W_00,  beta_k^T alpha_k = W_{k,k+1},
///   beta_{k+1}^T beta_{k+1} = W_{k+1,k+1} - alpha_k^T alpha_k.
/// Throws MpctError(kFactorizationFailure) on a non-positive pivot.
BandedFactor factor_block_tridiagonal(std::span<const Eigen::MatrixXd> diag,
                                      std::span<const Eigen::MatrixXd> upper);

/// Solves Wc^T Wc z = c in place (forward then backward substitution).
/// `z` holds c on entry, block k occupying entries [k*n, (k+1)*n).
void banded_forward_backward(const BandedFactor& factor, std::span<double> z);

/// Convenience overload returning the solution.
Eigen::VectorXd banded_forward_backward(const BandedFactor& factor,
                                        const Eigen::VectorXd& c);

}  // namespace mpct
