#pragma once

#include <random>
#include <vector>

#include "mpct/oracle.hpp"
#include "mpct/pendulum.hpp"

namespace mpct::testing {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi);
VectorXd uniform_vector(Rng& rng, Eigen::Index size, double lo, double hi);
MatrixXd uniform_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols, double lo,
                        double hi);
/// Random symmetric positive definite matrix with eigenvalues in [lo, hi].
MatrixXd random_spd(Rng& rng, Eigen::Index size, double lo, double hi);

/// Random well-posed problem: random A, B, boxes, weights and penalty.
ValidatedProblem random_problem(Rng& rng, int n, int m, int N);

/// Random iterate with zero padding in lambda/gamma column 0.
SolverState random_state(Rng& rng, int n, int m, int N, double scale = 1.0);

/// Sample a state from the box; infinite components are drawn from [-1, 1].
VectorXd sample_box(Rng& rng, const VectorXd& lo, const VectorXd& hi, double big);

/// Initial state from which an admissible steady state is reachable in N
/// steps without leaving the box: pick an admissible steady state, then run
/// the model backwards with random inputs, rejecting runs that leave the
/// state box.
VectorXd feasible_initial_state(Rng& rng, const ValidatedProblem& problem);

struct BlockTridiagonal {
  std::vector<MatrixXd> diag;   // N blocks, n x n
  std::vector<MatrixXd> upper;  // N-1 blocks, n x n
  MatrixXd dense;               // (N n) x (N n)
};

/// Random SPD block-tridiagonal matrix, made diagonally dominant by blocks.
BlockTridiagonal random_block_tridiagonal(Rng& rng, int n, int N);

/// Dense W = G3 H3^-1 G3' from the oracle assembly.
MatrixXd dense_schur(const oracle::DenseExtendedProblem& p);

}  // namespace mpct::testing
