#include "mpct/banded.hpp"

#include <string>

#include "mpct/error.hpp"

namespace mpct {

BandedFactor::BandedFactor(int block_size, int num_blocks)
    : n_(block_size),
      blocks_(num_blocks),
      tri_(block_size * (block_size + 1) / 2),
      alpha_(static_cast<std::size_t>(num_blocks > 0 ? num_blocks - 1 : 0) *
                 block_size * block_size,
             0.0),
      beta_hat_(static_cast<std::size_t>(num_blocks) * tri_, 0.0) {}

Eigen::MatrixXd BandedFactor::alpha_block(int k) const {
  Eigen::MatrixXd out(n_, n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) out(i, j) = alpha(k, i, j);
  return out;
}

Eigen::MatrixXd BandedFactor::beta_block(int k) const {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n_, n_);
  for (int i = 0; i < n_; ++i) {
    out(i, i) = 1.0 / beta_hat(k, i, i);
    for (int j = i + 1; j < n_; ++j) out(i, j) = beta_hat(k, i, j);
  }
  return out;
}

Eigen::MatrixXd BandedFactor::dense_factor() const {
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(n_ * blocks_, n_ * blocks_);
  for (int k = 0; k < blocks_; ++k) {
    W.block(k * n_, k * n_, n_, n_) = beta_block(k);
    if (k + 1 < blocks_) W.block(k * n_, (k + 1) * n_, n_, n_) = alpha_block(k);
  }
  return W;
}

BandedFactor factor_block_tridiagonal(std::span<const Eigen::MatrixXd> diag,
                                      std::span<const Eigen::MatrixXd> upper) {
  const int K = static_cast<int>(diag.size());
  if (K == 0 || static_cast<int>(upper.size()) != K - 1) {
    throw MpctError(ErrorCode::kDimensionMismatch,
                    "block-tridiagonal input needs K diagonal and K-1 upper blocks");
  }
  const int n = static_cast<int>(diag[0].rows());
  BandedFactor out(n, K);

  Eigen::MatrixXd pivot = diag[0];
  for (int k = 0; k < K; ++k) {
    // Upper factor of the current Schur complement.
    Eigen::LLT<Eigen::MatrixXd> llt(pivot);
    if (llt.info() != Eigen::Success) {
      throw MpctError(ErrorCode::kFactorizationFailure,
                      "non-positive pivot in diagonal block " + std::to_string(k));
    }
    const Eigen::MatrixXd beta = llt.matrixU();
    for (int i = 0; i < n; ++i) {
      if (!(beta(i, i) > 0.0)) {
        throw MpctError(ErrorCode::kFactorizationFailure,
                        "zero pivot in diagonal block " + std::to_string(k));
      }
      out.beta_hat(k, i, i) = 1.0 / beta(i, i);
      for (int j = i + 1; j < n; ++j) out.beta_hat(k, i, j) = beta(i, j);
    }
    if (k + 1 == K) break;

    // beta^T alpha = W_{k,k+1}
    const Eigen::MatrixXd alpha =
        beta.transpose().triangularView<Eigen::Lower>().solve(upper[k]);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) out.alpha(k, i, j) = alpha(i, j);
    pivot = diag[k + 1] - alpha.transpose() * alpha;
  }
  return out;
}

void banded_forward_backward(const BandedFactor& f, std::span<double> z) {
  const int n = f.block_size();
  const int N = f.num_blocks();

  // Forward substitution with Wc^T.
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < j; ++i) z[j] -= f.beta_hat(0, i, j) * z[i];
    z[j] *= f.beta_hat(0, j, j);
  }
  for (int k = 1; k < N; ++k) {
    double* zk = z.data() + static_cast<std::size_t>(n) * k;
    const double* zp = zk - n;
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) zk[j] -= f.alpha(k - 1, i, j) * zp[i];
      for (int i = 0; i < j; ++i) zk[j] -= f.beta_hat(k, i, j) * zk[i];
      zk[j] *= f.beta_hat(k, j, j);
    }
  }

  // Backward substitution with Wc.
  {
    double* zl = z.data() + static_cast<std::size_t>(n) * (N - 1);
    for (int j = n - 1; j >= 0; --j) {
      for (int i = n - 1; i > j; --i) zl[j] -= f.beta_hat(N - 1, j, i) * zl[i];
      zl[j] *= f.beta_hat(N - 1, j, j);
    }
  }
  for (int k = N - 2; k >= 0; --k) {
    double* zk = z.data() + static_cast<std::size_t>(n) * k;
    const double* zn = zk + n;
    for (int j = n - 1; j >= 0; --j) {
      for (int i = n - 1; i >= 0; --i) zk[j] -= f.alpha(k, j, i) * zn[i];
      for (int i = n - 1; i > j; --i) zk[j] -= f.beta_hat(k, j, i) * zk[i];
      zk[j] *= f.beta_hat(k, j, j);
    }
  }
}

Eigen::VectorXd banded_forward_backward(const BandedFactor& factor,
                                        const Eigen::VectorXd& c) {
  if (c.size() != static_cast<Eigen::Index>(factor.block_size()) * factor.num_blocks()) {
    throw MpctError(ErrorCode::kDimensionMismatch,
                    "right-hand side does not match the factor size");
  }
  Eigen::VectorXd z = c;
  banded_forward_backward(factor, std::span<double>(z.data(), z.size()));
  return z;
}

}  // namespace mpct
