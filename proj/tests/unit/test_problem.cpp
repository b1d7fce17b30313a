#include <doctest.h>

#include <cmath>

#include "mpct/pendulum.hpp"
#include "support.hpp"

using namespace mpct;

namespace {

pendulum::Scenario scenario() { return pendulum::reference_scenario(12); }

ErrorCode validate_code(SystemModel model, CostWeights costs, MpctConfig cfg,
                        PenaltyParams rho) {
  try {
    validate_problem(std::move(model), std::move(costs), cfg, std::move(rho));
  } catch (const MpctError& e) {
    return e.code();
  }
  FAIL("expected validate_problem to throw");
  return ErrorCode::kInvalidArgument;
}

PenaltyParams rho_for(const pendulum::Scenario& sc) {
  return build_rho(sc.model, sc.config, sc.rho_base, sc.rho_boosted);
}

}  // namespace

TEST_CASE("reference pendulum problem is accepted") {
  const ValidatedProblem p = pendulum::reference_problem(12);
  CHECK(p.n() == 3);
  CHECK(p.m() == 1);
  CHECK(p.horizon() == 12);
  CHECK(p.costs().Q_diag == Eigen::Vector3d::Constant(5.0));
  CHECK(p.costs().R_diag(0) == 0.025);
  CHECK(p.costs().T == 1000.0 * MatrixXd::Identity(3, 3));
  CHECK(p.costs().S(0, 0) == 0.125);
  // tightening defaults are filled in
  CHECK(p.model().eps_x == VectorXd::Constant(3, kDefaultTightening));
  CHECK(p.model().eps_u == VectorXd::Constant(1, kDefaultTightening));
}

TEST_CASE("degenerate or empty boxes are rejected") {
  auto sc = scenario();
  SUBCASE("x_lb == x_ub") {
    sc.model.x_lb(0) = sc.model.x_ub(0);
  }
  SUBCASE("u_lb > u_ub") {
    sc.model.u_lb(0) = 5.0;
  }
  SUBCASE("tightening swallows the box") {
    sc.model.eps_u = VectorXd::Constant(1, 4.5);
  }
  CHECK(validate_code(sc.model, sc.costs, sc.config, rho_for(sc)) == ErrorCode::kEmptyBox);
}

TEST_CASE("horizon below two is rejected") {
  auto sc = scenario();
  sc.config.N = 1;
  const PenaltyParams rho = uniform_rho(3, 1, 1, 1.0);
  CHECK(validate_code(sc.model, sc.costs, sc.config, rho) == ErrorCode::kHorizonTooShort);
}

TEST_CASE("dimension mismatches are rejected") {
  auto sc = scenario();
  PenaltyParams rho = rho_for(sc);
  SUBCASE("B rows") { sc.model.B = MatrixXd::Zero(2, 1); }
  SUBCASE("A not square") { sc.model.A = MatrixXd::Zero(3, 2); }
  SUBCASE("state bound length") { sc.model.x_ub = VectorXd::Ones(2); }
  SUBCASE("Q length") { sc.costs.Q_diag = VectorXd::Ones(4); }
  SUBCASE("T shape") { sc.costs.T = MatrixXd::Identity(2, 2); }
  SUBCASE("rho_hat columns") { rho.rho_hat = MatrixXd::Ones(4, 12); }
  SUBCASE("rho_s length") { rho.rho_s = VectorXd::Ones(3); }
  CHECK(validate_code(sc.model, sc.costs, sc.config, rho) == ErrorCode::kDimensionMismatch);
}

TEST_CASE("weights must be positive definite") {
  auto sc = scenario();
  PenaltyParams rho = rho_for(sc);
  SUBCASE("Q entry zero") { sc.costs.Q_diag(1) = 0.0; }
  SUBCASE("R negative") { sc.costs.R_diag(0) = -1.0; }
  SUBCASE("T asymmetric") { sc.costs.T(0, 1) = 1.0; }
  SUBCASE("S indefinite") { sc.costs.S(0, 0) = -0.1; }
  SUBCASE("rho0 zero") { rho.rho0(2) = 0.0; }
  SUBCASE("rho_hat negative") { rho.rho_hat(1, 5) = -3.0; }
  CHECK(validate_code(sc.model, sc.costs, sc.config, rho) == ErrorCode::kNonPositiveWeight);
}

TEST_CASE("T within symmetric tolerance is accepted") {
  auto sc = scenario();
  sc.costs.T(0, 1) = 1e-10;  // 1e-13 relative to max |T| = 1000
  CHECK_NOTHROW(validate_problem(sc.model, sc.costs, sc.config, rho_for(sc)));
}

TEST_CASE("non-finite data and bad settings are rejected") {
  auto sc = scenario();
  PenaltyParams rho = rho_for(sc);
  SUBCASE("NaN in A") {
    sc.model.A(1, 1) = std::nan("");
    CHECK_THROWS_AS(validate_problem(sc.model, sc.costs, sc.config, rho), MpctError);
  }
  SUBCASE("epsilon") {
    sc.config.epsilon = 0.0;
    CHECK(validate_code(sc.model, sc.costs, sc.config, rho) == ErrorCode::kInvalidArgument);
  }
  SUBCASE("max_iter") {
    sc.config.max_iter = 0;
    CHECK(validate_code(sc.model, sc.costs, sc.config, rho) == ErrorCode::kInvalidArgument);
  }
  SUBCASE("negative tightening") {
    sc.model.eps_x = VectorXd::Constant(3, -1e-3);
    CHECK_THROWS_AS(validate_problem(sc.model, sc.costs, sc.config, rho), MpctError);
  }
}

TEST_CASE("build_rho whole-column pattern") {
  const auto sc = scenario();
  const PenaltyParams rho =
      build_rho(sc.model, sc.config, 20.0, 1000.0, BoostPattern::kWholeColumn);
  CHECK(rho.rho_hat.col(0) == VectorXd::Constant(4, 1000.0));
  CHECK(rho.rho_hat.col(4) == VectorXd::Constant(4, 20.0));
  CHECK(rho.rho_hat.col(12) == VectorXd::Constant(4, 1000.0));
  CHECK(rho.rho0 == VectorXd::Constant(3, 1000.0));
  CHECK(rho.rho_s == VectorXd::Constant(4, 1000.0));
}

TEST_CASE("build_rho constraint-list pattern boosts only the listed rows") {
  const auto sc = scenario();
  const PenaltyParams rho = build_rho(sc.model, sc.config, 20.0, 1000.0);
  CHECK(rho.rho_hat.col(0) == Eigen::Vector4d(1000.0, 1000.0, 1000.0, 20.0));
  for (int j = 1; j < 12; ++j) CHECK(rho.rho_hat.col(j) == VectorXd::Constant(4, 20.0));
  CHECK(rho.rho_hat.col(12) == VectorXd::Constant(4, 1000.0));
  CHECK(rho.rho0 == VectorXd::Constant(3, 1000.0));
  CHECK(rho.rho_s == VectorXd::Constant(4, 1000.0));
}

TEST_CASE("build_rho with equal levels is uniform") {
  const auto sc = scenario();
  for (auto pattern : {BoostPattern::kConstraintList, BoostPattern::kWholeColumn}) {
    const PenaltyParams rho = build_rho(sc.model, sc.config, 7.0, 7.0, pattern);
    const PenaltyParams u = uniform_rho(3, 1, 12, 7.0);
    CHECK(rho.rho0 == u.rho0);
    CHECK(rho.rho_s == u.rho_s);
    CHECK(rho.rho_hat == u.rho_hat);
    CHECK(rho.rho_hat.minCoeff() == 7.0);
    CHECK(rho.rho_hat.maxCoeff() == 7.0);
  }
}

TEST_CASE("build_rho rejects non-positive levels") {
  const auto sc = scenario();
  try {
    build_rho(sc.model, sc.config, 0.0, 1000.0);
    FAIL("expected throw");
  } catch (const MpctError& e) {
    CHECK(e.code() == ErrorCode::kNonPositiveWeight);
  }
  CHECK_THROWS_AS(build_rho(sc.model, sc.config, 20.0, -1.0), MpctError);
}

TEST_CASE("rho upper bound") {
  CostWeights c;
  c.Q_diag = VectorXd::Constant(3, 5.0);
  c.R_diag = VectorXd::Constant(1, 0.025);
  CHECK(std::abs(compute_rho_upper_bound(c) - 0.15 / 17.0) <= 1e-15);

  c.Q_diag = VectorXd::Ones(2);
  c.R_diag = VectorXd::Ones(2);
  CHECK(std::abs(compute_rho_upper_bound(c) - 6.0 / 17.0) <= 1e-15);
}

TEST_CASE("rho upper bound is 6/17 of the smallest weight and monotone") {
  testing::Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    CostWeights c;
    c.Q_diag = testing::uniform_vector(rng, 4, 0.01, 10.0);
    c.R_diag = testing::uniform_vector(rng, 2, 0.01, 10.0);
    const double b = compute_rho_upper_bound(c);
    const double mn = std::min(c.Q_diag.minCoeff(), c.R_diag.minCoeff());
    CHECK(b == doctest::Approx(6.0 * mn / 17.0).epsilon(1e-15));

    CostWeights bigger = c;
    const int k = static_cast<int>(rng() % 6);
    if (k < 4) {
      bigger.Q_diag(k) += testing::uniform(rng, 0.0, 5.0);
    } else {
      bigger.R_diag(k - 4) += testing::uniform(rng, 0.0, 5.0);
    }
    CHECK(compute_rho_upper_bound(bigger) >= b);
  }
}

TEST_CASE("max_penalty and error names") {
  const PenaltyParams rho = pendulum::reference_problem(12).rho();
  CHECK(max_penalty(rho) == 1000.0);
  CHECK(to_string(ErrorCode::kEmptyBox) == "EmptyBox");
  CHECK(to_string(ErrorCode::kNumericalBreakdown) == "NumericalBreakdown");
  const MpctError e(ErrorCode::kSupportViolation, "x");
  CHECK(e.code() == ErrorCode::kSupportViolation);
}
