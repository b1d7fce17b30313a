#include "support.hpp"

#include <cmath>
#include <stdexcept>

namespace mpct::testing {

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

VectorXd uniform_vector(Rng& rng, Eigen::Index size, double lo, double hi) {
  VectorXd v(size);
  for (Eigen::Index i = 0; i < size; ++i) v(i) = uniform(rng, lo, hi);
  return v;
}

MatrixXd uniform_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols, double lo,
                        double hi) {
  MatrixXd M(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) M(i, j) = uniform(rng, lo, hi);
  }
  return M;
}

MatrixXd random_spd(Rng& rng, Eigen::Index size, double lo, double hi) {
  const MatrixXd Q = Eigen::HouseholderQR<MatrixXd>(uniform_matrix(rng, size, size, -1, 1))
                         .householderQ();
  const VectorXd ev = uniform_vector(rng, size, lo, hi);
  MatrixXd M = Q * ev.asDiagonal() * Q.transpose();
  return 0.5 * (M + M.transpose());
}

ValidatedProblem random_problem(Rng& rng, int n, int m, int N) {
  SystemModel model;
  model.A = MatrixXd::Identity(n, n) + uniform_matrix(rng, n, n, -0.3, 0.3);
  model.B = uniform_matrix(rng, n, m, -1.0, 1.0);
  model.x_lb = -uniform_vector(rng, n, 1.0, 5.0);
  model.x_ub = uniform_vector(rng, n, 1.0, 5.0);
  model.u_lb = -uniform_vector(rng, m, 0.5, 2.0);
  model.u_ub = uniform_vector(rng, m, 0.5, 2.0);

  CostWeights costs;
  costs.Q_diag = uniform_vector(rng, n, 0.5, 5.0);
  costs.R_diag = uniform_vector(rng, m, 0.05, 1.0);
  costs.T = random_spd(rng, n, 10.0, 100.0);
  costs.S = random_spd(rng, m, 0.1, 1.0);

  MpctConfig cfg;
  cfg.N = N;

  PenaltyParams rho;
  rho.rho0 = uniform_vector(rng, n, 5.0, 50.0);
  rho.rho_s = uniform_vector(rng, n + m, 5.0, 50.0);
  rho.rho_hat = uniform_matrix(rng, n + m, N + 1, 1.0, 30.0);
  return validate_problem(std::move(model), std::move(costs), cfg, std::move(rho));
}

SolverState random_state(Rng& rng, int n, int m, int N, double scale) {
  SolverState s = cold_start(n, m, N);
  const int nm = n + m;
  s.z1 = uniform_matrix(rng, nm, N + 1, -scale, scale);
  s.z2 = uniform_vector(rng, nm, -scale, scale);
  s.z3 = uniform_matrix(rng, nm, N + 1, -scale, scale);
  s.lambda = uniform_matrix(rng, nm, N + 3, -scale, scale);
  s.lambda.col(0).tail(m).setZero();
  return s;
}

VectorXd sample_box(Rng& rng, const VectorXd& lo, const VectorXd& hi, double big) {
  VectorXd v(lo.size());
  for (Eigen::Index i = 0; i < lo.size(); ++i) {
    const double a = std::abs(lo(i)) >= big ? -1.0 : lo(i);
    const double b = std::abs(hi(i)) >= big ? 1.0 : hi(i);
    v(i) = uniform(rng, a, b);
  }
  return v;
}

VectorXd feasible_initial_state(Rng& rng, const ValidatedProblem& problem) {
  const SystemModel& model = problem.model();
  const int n = problem.n();
  const int m = problem.m();
  const double big = problem.config().big_bound;

  MatrixXd G2(n, n + m);
  G2 << model.A - MatrixXd::Identity(n, n), model.B;
  Eigen::JacobiSVD<MatrixXd> svd(G2, Eigen::ComputeFullV);
  const MatrixXd null_basis = svd.matrixV().rightCols(m);

  VectorXd lo(n + m), hi(n + m);
  lo << model.x_lb + model.eps_x, model.u_lb + model.eps_u;
  hi << model.x_ub - model.eps_x, model.u_ub - model.eps_u;
  for (Eigen::Index i = 0; i < lo.size(); ++i) {
    if (std::abs(lo(i)) >= big) lo(i) = -1.0;
    if (std::abs(hi(i)) >= big) hi(i) = 1.0;
  }
  const Eigen::PartialPivLU<MatrixXd> A_lu(model.A);

  for (int attempt = 0; attempt < 10000; ++attempt) {
    // Admissible steady state, shrunk until it sits inside the tightened box.
    VectorXd ss = null_basis * uniform_vector(rng, m, -1.0, 1.0);
    double t = 1.0;
    for (Eigen::Index i = 0; i < ss.size(); ++i) {
      if (ss(i) > 0.0) t = std::min(t, 0.9 * hi(i) / ss(i));
      if (ss(i) < 0.0) t = std::min(t, 0.9 * lo(i) / ss(i));
    }
    ss *= uniform(rng, 0.0, t);

    VectorXd x = ss.head(n);
    bool ok = true;
    for (int i = 0; i < problem.horizon() && ok; ++i) {
      const VectorXd u = sample_box(rng, 0.9 * model.u_lb, 0.9 * model.u_ub, 0.9 * big);
      x = A_lu.solve(x - model.B * u);
      for (Eigen::Index k = 0; k < n; ++k) {
        if (x(k) <= model.x_lb(k) || x(k) >= model.x_ub(k)) ok = false;
      }
    }
    if (ok) return x;
  }
  throw std::runtime_error("no feasible initial state found");
}

BlockTridiagonal random_block_tridiagonal(Rng& rng, int n, int N) {
  BlockTridiagonal t;
  for (int k = 0; k + 1 < N; ++k) t.upper.push_back(uniform_matrix(rng, n, n, -1.0, 1.0));
  for (int k = 0; k < N; ++k) {
    // Off-diagonal row mass is at most 2 n; shift the diagonal past it.
    t.diag.push_back(random_spd(rng, n, 1.0, 3.0) +
                     (2.0 * n + 1.0) * MatrixXd::Identity(n, n));
  }
  t.dense = MatrixXd::Zero(N * n, N * n);
  for (int k = 0; k < N; ++k) t.dense.block(k * n, k * n, n, n) = t.diag[k];
  for (int k = 0; k + 1 < N; ++k) {
    t.dense.block(k * n, (k + 1) * n, n, n) = t.upper[k];
    t.dense.block((k + 1) * n, k * n, n, n) = t.upper[k].transpose();
  }
  return t;
}

MatrixXd dense_schur(const oracle::DenseExtendedProblem& p) {
  const MatrixXd H3inv = p.H3.inverse();
  return p.G3 * H3inv * p.G3.transpose();
}

}  // namespace mpct::testing
