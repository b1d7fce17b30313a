#include <doctest.h>

#include "support.hpp"

using namespace mpct;
using testing::Rng;

namespace {

ValidatedProblem scalar_problem() {
  SystemModel model;
  model.A = MatrixXd::Constant(1, 1, 0.9);
  model.B = MatrixXd::Constant(1, 1, 0.5);
  model.x_lb = VectorXd::Constant(1, -5.0);
  model.x_ub = VectorXd::Constant(1, 5.0);
  model.u_lb = VectorXd::Constant(1, -1.0);
  model.u_ub = VectorXd::Constant(1, 1.0);
  CostWeights costs;
  costs.Q_diag = VectorXd::Ones(1);
  costs.R_diag = VectorXd::Ones(1);
  costs.T = MatrixXd::Identity(1, 1);
  costs.S = MatrixXd::Identity(1, 1);
  MpctConfig cfg;
  cfg.N = 2;
  return validate_problem(model, costs, cfg, uniform_rho(1, 1, 2, 2.0));
}

int rank_of(const MatrixXd& M) {
  Eigen::FullPivLU<MatrixXd> lu(M);
  lu.setThreshold(1e-10);
  return static_cast<int>(lu.rank());
}

}  // namespace

TEST_CASE("assembly of the smallest instance") {
  const auto p = oracle::assemble_dense(scalar_problem(), VectorXd::Constant(1, 0.3),
                                        VectorXd::Zero(2));
  CHECK(p.mz == 9);
  CHECK(p.A1.rows() == 9);
  CHECK(p.A1.cols() == 6);
  CHECK(p.A2.cols() == 2);
  CHECK(p.A3.cols() == 6);
  CHECK(p.b(0) == 0.3);
  CHECK(p.b.tail(8).isZero(0));

  MatrixXd A2(9, 2);
  A2 << 0, 0,  //
      1, 0, 0, 1, 1, 0, 0, 1, 1, 0, 0, 1, 1, 0, 0, 1;
  CHECK(p.A2 == A2);
  CHECK(p.A3.topRows(1).isZero(0));
  CHECK(p.A3.middleRows(1, 6) == MatrixXd::Identity(6, 6));
  CHECK(p.A3.bottomRows(2).isZero(0));
  CHECK(p.A1(0, 0) == 1.0);
  CHECK(p.A1.bottomRightCorner(2, 2) == -MatrixXd::Identity(2, 2));
  CHECK(p.G2.rows() == 1);
  CHECK(p.G3.rows() == 2);
}

TEST_CASE("structural identities of the coupling matrices") {
  Rng rng(3);
  for (int t = 0; t < 6; ++t) {
    const int n = 1 + t % 3, m = 1 + t % 2, N = 2 + t;
    const auto prob = testing::random_problem(rng, n, m, N);
    const auto p = oracle::assemble_dense(prob, VectorXd::Zero(n), VectorXd::Zero(n + m));
    const int nm = n + m, nz = (N + 1) * nm;
    CHECK(p.mz == n + (N + 2) * nm);
    CHECK(rank_of(p.A1) == nz);
    CHECK(rank_of(p.A2) == nm);
    CHECK(rank_of(p.A3) == nz);
    CHECK(rank_of(p.G3) == N * n);
    CHECK((p.A2.transpose() * p.A2 - (N + 2) * MatrixXd::Identity(nm, nm)).isZero(0));
    CHECK((p.A3.transpose() * p.A3 - MatrixXd::Identity(nz, nz)).isZero(0));
    const MatrixXd A1tA1 = p.A1.transpose() * p.A1;
    CHECK(MatrixXd(A1tA1.diagonal().asDiagonal()) == A1tA1);
    Eigen::JacobiSVD<MatrixXd> svd(p.A3);
    CHECK(svd.singularValues()(0) == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("zero is a fixed point when x and r are zero") {
  const auto p = oracle::assemble_dense(pendulum::reference_problem(12), VectorXd::Zero(3),
                                        VectorXd::Zero(4));
  oracle::DenseIterate it;
  it.z1 = VectorXd::Zero(52);
  it.z2 = VectorXd::Zero(4);
  it.z3 = VectorXd::Zero(52);
  it.lambda = VectorXd::Zero(p.mz);
  const auto next = oracle::dense_eadmm_step(p, it);
  CHECK(oracle::max_abs_deviation(it, next) == 0.0);
  CHECK(oracle::kkt_residual(p, next.z1, next.z2, next.z3, next.lambda) == 0.0);
}

TEST_CASE("KKT residual of the exact optimum of a problem without active bounds") {
  // Loose boxes: the z1 bounds never bind, so the optimum solves one linear
  // KKT system in (z1, z2, z3, lambda, nu2, nu3).
  Rng rng(12);
  const auto base = testing::random_problem(rng, 2, 1, 4);
  SystemModel model = base.model();
  model.x_lb.setConstant(-1e6);
  model.x_ub.setConstant(1e6);
  model.u_lb.setConstant(-1e6);
  model.u_ub.setConstant(1e6);
  model.eps_x.setZero();
  model.eps_u.setZero();
  const auto prob = validate_problem(model, base.costs(), base.config(), base.rho());
  const VectorXd x = testing::uniform_vector(rng, 2, -1.0, 1.0);
  const VectorXd r = testing::uniform_vector(rng, 3, -1.0, 1.0);
  const auto p = oracle::assemble_dense(prob, x, r);

  const Eigen::Index nz = p.A1.cols(), nm = p.A2.cols(), mz = p.mz;
  const Eigen::Index g2 = p.G2.rows(), g3 = p.G3.rows();
  const Eigen::Index nw = 2 * nz + nm, dim = nw + mz + g2 + g3;
  MatrixXd K = MatrixXd::Zero(dim, dim);
  VectorXd rhs = VectorXd::Zero(dim);
  MatrixXd Az(mz, nw);
  Az << p.A1, p.A2, p.A3;
  K.block(nz, nz, nm, nm) = p.TS;
  K.block(nz + nm, nz + nm, nz, nz) = p.QR_full.asDiagonal();
  K.block(0, nw, nw, mz) = Az.transpose();
  K.block(nw, 0, mz, nw) = Az;
  K.block(nz, nw + mz, nm, g2) = p.G2.transpose();
  K.block(nw + mz, nz, g2, nm) = p.G2;
  K.block(nz + nm, nw + mz + g2, nz, g3) = p.G3.transpose();
  K.block(nw + mz + g2, nz + nm, g3, nz) = p.G3;
  rhs.segment(nz, nm) = p.TS * p.r;
  rhs.segment(nw, mz) = p.b;
  const VectorXd sol = K.fullPivLu().solve(rhs);
  REQUIRE((K * sol - rhs).norm() <= 1e-9 * rhs.norm());

  const VectorXd z1 = sol.head(nz), z2 = sol.segment(nz, nm), z3 = sol.segment(nz + nm, nz);
  const VectorXd lambda = sol.segment(nw, mz);
  CHECK(oracle::kkt_residual(p, z1, z2, z3, lambda) <= 1e-9);

  SUBCASE("a perturbed point is flagged") {
    VectorXd z2b = z2;
    z2b(0) += 1e-3;
    CHECK(oracle::kkt_residual(p, z1, z2b, z3, lambda) > 1e-4);
  }
  SUBCASE("the original-problem view") {
    const auto orig = oracle::map_to_original(
        2, 1, Eigen::Map<const MatrixXd>(z1.data(), nm, 5), z2,
        Eigen::Map<const MatrixXd>(z3.data(), nm, 5));
    CHECK(orig.congruence_err <= 1e-9);
    CHECK((orig.x_traj.col(0) - x).cwiseAbs().maxCoeff() <= 1e-9);
    for (int j = 0; j < 4; ++j) {
      const VectorXd pred = model.A * orig.x_traj.col(j) + model.B * orig.u_traj.col(j);
      CHECK((orig.x_traj.col(j + 1) - pred).cwiseAbs().maxCoeff() <= 1e-8);
    }
    CHECK((orig.x_traj.col(4) - orig.xs).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK((model.A * orig.xs + model.B * orig.us - orig.xs).cwiseAbs().maxCoeff() <= 1e-9);
  }
}

TEST_CASE("map_to_original shapes") {
  const MatrixXd z1 = MatrixXd::Random(4, 13);
  const VectorXd z2 = VectorXd::Random(4);
  MatrixXd z3 = z1.colwise() - z2;
  const auto o = oracle::map_to_original(3, 1, z1, z2, z3);
  CHECK(o.x_traj.cols() == 13);
  CHECK(o.u_traj.cols() == 12);
  CHECK(o.u_traj.rows() == 1);
  CHECK(o.congruence_err <= 1e-15);
  z3(0, 5) += 0.5;
  CHECK(oracle::map_to_original(3, 1, z1, z2, z3).congruence_err ==
        doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("equality-constrained subproblem solver") {
  Rng rng(41);
  for (int t = 0; t < 20; ++t) {
    const MatrixXd H = testing::random_spd(rng, 6, 0.5, 10.0);
    const MatrixXd G = testing::uniform_matrix(rng, 2, 6, -1.0, 1.0);
    const VectorXd q = testing::uniform_vector(rng, 6, -3.0, 3.0);
    const VectorXd z = oracle::solve_equality_qp(H, q, G);
    CHECK((G * z).cwiseAbs().maxCoeff() <= 1e-10);
    // gradient lies in the row space of G
    const VectorXd g = H * z + q;
    const VectorXd nu = G.transpose().colPivHouseholderQr().solve(g);
    CHECK((G.transpose() * nu - g).cwiseAbs().maxCoeff() <= 1e-10);
  }
  try {
    oracle::solve_equality_qp(-MatrixXd::Identity(2, 2), VectorXd::Zero(2), MatrixXd::Ones(1, 2));
    FAIL("expected SingularKkt");
  } catch (const MpctError& e) {
    CHECK(e.code() == ErrorCode::kSingularKkt);
  }
  CHECK_THROWS_AS(
      oracle::solve_equality_qp(MatrixXd::Identity(2, 2), VectorXd::Zero(2), MatrixXd::Ones(2, 2)),
      MpctError);
}

TEST_CASE("replaying iterations is deterministic") {
  const auto prob = pendulum::reference_problem(12);
  const auto p = oracle::assemble_dense(prob, Eigen::Vector3d(0.0, 0.0, 1.0), VectorXd::Zero(4));
  auto run = [&] {
    auto it = oracle::to_dense(cold_start(3, 1, 12), 3);
    for (int k = 0; k < 10; ++k) it = oracle::dense_eadmm_step(p, it);
    return it;
  };
  const auto a = run();
  const auto b = run();
  CHECK(a.z1 == b.z1);
  CHECK(a.lambda == b.lambda);
}

TEST_CASE("layout round trip") {
  Rng rng(8);
  const SolverState s = testing::random_state(rng, 3, 2, 5, 2.0);
  const auto it = oracle::to_dense(s, 3);
  CHECK(it.lambda.size() == 3 + 7 * 5);
  const SolverState back = oracle::from_dense(it, 3, 2, 5);
  CHECK(back.z1 == s.z1);
  CHECK(back.z2 == s.z2);
  CHECK(back.z3 == s.z3);
  CHECK(back.lambda == s.lambda);
  CHECK(back.gamma == s.gamma);
}

TEST_CASE("recovered trajectory follows the model up to the coupling residual") {
  // x_{j+1} - A x_j - B u_j = -gamma_{j+1} + [A B] gamma_j on the state rows
  const auto p = pendulum::reference_problem(12);
  const OfflineData d = build_offline(p);
  MatrixXd AB(3, 4);
  AB << p.model().A, p.model().B;
  const double gain = 1.0 + AB.cwiseAbs().rowwise().sum().maxCoeff();
  Rng rng(5);
  for (int t = 0; t < 20; ++t) {
    const VectorXd x = testing::feasible_initial_state(rng, p);
    const auto res = eadmm_solve(d, {1e-4, 4000}, x, VectorXd::Zero(4), cold_start(3, 1, 12));
    REQUIRE(res.converged);
    const auto o = oracle::map_to_original(3, 1, res.state.z1, res.state.z2, res.state.z3);
    double worst = 0.0;
    for (int j = 0; j < 12; ++j) {
      const VectorXd v = o.x_traj.col(j + 1) - p.model().A * o.x_traj.col(j) -
                         p.model().B * o.u_traj.col(j);
      worst = std::max(worst, v.cwiseAbs().maxCoeff());
    }
    CHECK(worst <= gain * res.residual_inf + 1e-8);
    CHECK(o.congruence_err <= res.residual_inf);
  }
}
