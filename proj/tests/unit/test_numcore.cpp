#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace rfr;

TEST(Lu, IdentityAndDiagonal) {
  const Vector rhs = Vector::LinSpaced(3, 1.0, 3.0);
  EXPECT_TRUE(lu_solve(Matrix::Identity(3, 3), rhs).isApprox(rhs));
  Matrix d = Matrix::Zero(3, 3);
  d.diagonal() << 2.0, 4.0, 8.0;
  Vector expected(3);
  expected << 0.5, 0.5, 0.375;
  EXPECT_LT((lu_solve(d, rhs) - expected).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Lu, NeedsPivoting) {
  Matrix m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  Vector rhs(2);
  rhs << 3.0, 5.0;
  const Vector x = lu_solve(m, rhs);
  EXPECT_DOUBLE_EQ(x(0), 5.0);
  EXPECT_DOUBLE_EQ(x(1), 3.0);
}

TEST(Lu, SingularAndNonSquareThrow) {
  Matrix s(2, 2);
  s << 1.0, 2.0, 2.0, 4.0;
  EXPECT_THROW(LuFactor{s}, SingularMatrixError);
  EXPECT_THROW(LuFactor{Matrix::Ones(2, 3)}, SingularMatrixError);
}

TEST(Lu, RandomResidual) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix m(20, 20);
    for (Index i = 0; i < 20; ++i)
      for (Index j = 0; j < 20; ++j) m(i, j) = u(rng);
    m.diagonal().array() += 5.0;
    Matrix rhs(20, 3);
    for (Index i = 0; i < 20; ++i)
      for (Index j = 0; j < 3; ++j) rhs(i, j) = u(rng);
    const LuFactor lu(m);
    const Matrix x = lu.solve(rhs);
    EXPECT_LT((m * x - rhs).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Lp, MinimizeSingleLowerBound) {
  LpProblem lp(1);
  lp.cost << 1.0;
  lp.lower << 1.0;
  const LpSolution s = solve_lp(lp);
  ASSERT_TRUE(s.optimal());
  EXPECT_NEAR(s.objective, 1.0, 1e-12);
  EXPECT_NEAR(s.x(0), 1.0, 1e-12);
}

TEST(Lp, MaximizeUnboundedRay) {
  LpProblem lp(1);
  lp.sense = Sense::Maximize;
  lp.cost << 1.0;
  EXPECT_EQ(solve_lp(lp).status, LpStatus::Unbounded);
}

TEST(Lp, SimplexBudget) {
  LpProblem lp(2);
  lp.sense = Sense::Maximize;
  lp.cost << 1.0, 1.0;
  lp.a_ub = Matrix::Ones(1, 2);
  lp.b_ub = Vector::Ones(1);
  const LpSolution s = solve_lp(lp);
  ASSERT_TRUE(s.optimal());
  EXPECT_NEAR(s.objective, 1.0, 1e-12);
}

TEST(Lp, InfeasibleBounds) {
  LpProblem lp(1);
  lp.cost << 1.0;
  lp.a_ub = Matrix::Ones(1, 1);
  lp.b_ub = Vector::Constant(1, -1.0);
  const LpSolution s = solve_lp(lp);
  EXPECT_EQ(s.status, LpStatus::Infeasible);
  EXPECT_GT(s.infeasibility, 1e-9);
}

TEST(Lp, InfeasibleEqualities) {
  LpProblem lp(2);
  lp.cost << 1.0, 1.0;
  lp.lower.setConstant(-kInf);
  lp.a_eq.resize(2, 2);
  lp.a_eq << 1.0, 1.0, 1.0, 1.0;
  lp.b_eq.resize(2);
  lp.b_eq << 1.0, 2.0;
  EXPECT_EQ(solve_lp(lp).status, LpStatus::Infeasible);
}

TEST(Lp, FreeVariablesWithEquality) {
  // min x + 2y, x + y = 1, x - y <= 3, free variables: optimum at x = 2, y = -1.
  LpProblem lp(2);
  lp.cost << 1.0, 2.0;
  lp.lower.setConstant(-kInf);
  lp.a_eq = Matrix::Ones(1, 2);
  lp.b_eq = Vector::Ones(1);
  lp.a_ub.resize(1, 2);
  lp.a_ub << 1.0, -1.0;
  lp.b_ub = Vector::Constant(1, 3.0);
  const LpSolution s = solve_lp(lp);
  ASSERT_TRUE(s.optimal());
  EXPECT_NEAR(s.x(0), 2.0, 1e-10);
  EXPECT_NEAR(s.x(1), -1.0, 1e-10);
  EXPECT_NEAR(s.objective, 0.0, 1e-10);
}

TEST(Lp, NegativeUpperBoundAndMaximize) {
  LpProblem lp(1);
  lp.sense = Sense::Maximize;
  lp.cost << 2.0;
  lp.lower << -5.0;
  lp.upper << -1.0;
  const LpSolution s = solve_lp(lp);
  ASSERT_TRUE(s.optimal());
  EXPECT_NEAR(s.objective, -2.0, 1e-12);
}

TEST(Lp, DegenerateCyclingExample) {
  // Classic cycling instance; optimum -5/4 at x = (1, 0, 1, 0).
  LpProblem lp(4);
  lp.cost << -0.75, 20.0, -0.5, 6.0;
  lp.a_ub.resize(3, 4);
  lp.a_ub << 0.25, -8.0, -1.0, 9.0, 0.5, -12.0, -0.5, 3.0, 0.0, 0.0, 1.0, 0.0;
  lp.b_ub.resize(3);
  lp.b_ub << 0.0, 0.0, 1.0;
  const LpSolution s = solve_lp(lp);
  ASSERT_TRUE(s.optimal());
  EXPECT_NEAR(s.objective, -1.25, 1e-10);
}

TEST(Lp, RandomAgainstVertexEnumeration) {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> dim(1, 6), rows(1, 8), coin(0, 1);
  std::uniform_real_distribution<double> u(-1.0, 1.0), slack(0.0, 1.0);
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = dim(rng);
    const int m = rows(rng);
    const int m_eq = n > 1 ? std::min(coin(rng) + coin(rng), n - 1) : 0;
    LpProblem lp(n);
    lp.sense = coin(rng) ? Sense::Maximize : Sense::Minimize;
    Vector x0(n);
    for (int j = 0; j < n; ++j) {
      lp.cost(j) = u(rng);
      lp.lower(j) = -2.0 + u(rng);
      lp.upper(j) = 2.0 + u(rng);
      x0(j) = u(rng);
    }
    lp.a_ub.resize(m, n);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) lp.a_ub(i, j) = u(rng);
    lp.b_ub = lp.a_ub * x0 + Vector::NullaryExpr(m, [&] { return slack(rng); });
    lp.a_eq.resize(m_eq, n);
    for (int i = 0; i < m_eq; ++i)
      for (int j = 0; j < n; ++j) lp.a_eq(i, j) = u(rng);
    lp.b_eq = lp.a_eq * x0;
    const auto best = oracle::enumerate_lp(lp);
    ASSERT_TRUE(best.has_value()) << "trial " << trial;
    const LpSolution s = solve_lp(lp);
    ASSERT_TRUE(s.optimal()) << "trial " << trial << " " << to_string(s.status);
    EXPECT_NEAR(s.objective, *best, 1e-7) << "trial " << trial;
    EXPECT_LT((lp.a_ub * s.x - lp.b_ub).maxCoeff(), 1e-7);
    if (m_eq > 0) {
      EXPECT_LT((lp.a_eq * s.x - lp.b_eq).cwiseAbs().maxCoeff(), 1e-7);
    }
    ++checked;
  }
  EXPECT_EQ(checked, 200);
}
