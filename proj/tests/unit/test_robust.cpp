#include "oracles.hpp"

#include "rfr/documents.hpp"
#include "rfr/robust.hpp"

#include <gtest/gtest.h>

using namespace rfr;

namespace {

struct Fixture {
  Network net;
  RealLinearBundle bd;
  UncertaintyModel unc;
};

Fixture load(const char* name, UncertaintyMode mode, double delta) {
  Fixture f;
  f.net = load_network(oracle::data_path(name));
  f.bd = assemble_bundle(f.net);
  f.unc = build_uncertainty(f.net, f.bd, mode, delta);
  return f;
}

Matrix row(std::initializer_list<double> xs) {
  Matrix m(1, static_cast<Index>(xs.size()));
  Index j = 0;
  for (double x : xs) m(0, j++) = x;
  return m;
}

Vector vec(std::initializer_list<double> xs) {
  return Eigen::Map<const Vector>(xs.begin(), static_cast<Index>(xs.size()));
}

Polytope interval(double lo, double hi) {
  Polytope p;
  p.G = Matrix(2, 1);
  p.G << 1.0, -1.0;
  p.g = vec({hi, -lo});
  p.labels = {{RowKind::BoxUpper, "x"}, {RowKind::BoxLower, "x"}};
  p.columns = {"x"};
  return p;
}

// One uncertain row u * x <= 1 over x in [-1, 1], u in [0.8, 1.2].
AffineRegion toy_region() {
  AffineRegion r;
  r.H0 = Matrix::Ones(1, 1);
  r.h0 = Vector::Ones(1);
  r.dH = {Matrix::Ones(1, 1)};
  r.dh = {Vector::Zero(1)};
  r.u_nominal = vec({1.0});
  r.u_lower = vec({0.8});
  r.u_upper = vec({1.2});
  r.labels = {{RowKind::VoltageUpper, "toy", 0}};
  r.box = interval(-1.0, 1.0);
  return r;
}

// Multiplier LP with continuous beta in [0, 1], solved directly.
double full_multiplier_lp(const Matrix& G, const Vector& g, const Matrix& H, const Vector& h) {
  double total = 0.0;
  const Index n = G.cols();
  for (Index i = 0; i < H.rows(); ++i) {
    LpProblem lp(n + 1);
    lp.sense = Sense::Maximize;
    lp.lower.head(n).setConstant(-kInf);
    lp.upper(n) = 1.0;
    lp.cost.head(n) = -H.row(i).transpose();
    lp.cost(n) = -h(i);
    lp.a_ub.resize(G.rows(), n + 1);
    lp.a_ub << -G, -g;
    lp.b_ub = Vector::Zero(G.rows());
    const LpSolution s = solve_lp(lp);
    EXPECT_TRUE(s.optimal());
    total += s.objective;
  }
  return total;
}

}  // namespace

TEST(Mtt, Examples) {
  EXPECT_NEAR(mtt_feasibility(row({1.0}), vec({1.0}), row({1.0}), vec({2.0})).objective, 0.0, 1e-12);
  const Polytope p = interval(-1.0, 1.0);
  EXPECT_NEAR(mtt_feasibility(p.G, p.g, row({1.0}), vec({0.5})).objective, 0.5, 1e-9);
  EXPECT_NEAR(mtt_feasibility(p.G, p.g, p.G, p.g).objective, 0.0, 1e-12);
}

TEST(AlphaBeta, Examples) {
  const Polytope p = interval(-1.0, 1.0);
  const Multipliers contained = alpha_beta_step(p.G, p.g, row({1.0}), vec({2.0}));
  EXPECT_NEAR(contained.objective, 0.0, 1e-12);
  const Multipliers toy = alpha_beta_step(p.G, p.g, row({1.0}), vec({0.5}));
  EXPECT_NEAR(toy.objective, 0.5, 1e-9);
  EXPECT_NEAR(toy.beta(0), 1.0, 1e-12);
  EXPECT_NEAR(toy.alpha(0, 0), -1.0, 1e-9);
  // Multipliers satisfy G alpha + beta g >= 0.
  EXPECT_GE((p.G * toy.alpha.row(0).transpose() + toy.beta(0) * p.g).minCoeff(), -1e-9);
}

TEST(AlphaBeta, BinaryBetaMatchesContinuousLp) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    const int dim = std::uniform_int_distribution<int>(1, 4)(rng);
    const Polytope inner = oracle::random_polytope(rng, dim, std::uniform_int_distribution<int>(dim + 1, 10)(rng));
    const Polytope outer = oracle::random_polytope(rng, dim, dim + 2);
    const Multipliers m = alpha_beta_step(inner.G, inner.g, outer.G, outer.g);
    EXPECT_NEAR(m.objective, full_multiplier_lp(inner.G, inner.g, outer.G, outer.g), 1e-7) << "trial " << trial;
  }
}

TEST(AlphaBeta, StrongDualityWithCertificateLp) {
  const Fixture f = load("twobus.json", UncertaintyMode::PhaseEntries, 0.2);
  const AffineRegion region = AffineRegion::build(f.bd, f.unc);
  const Polytope nominal = remove_redundant(region.polytope(region.u_nominal));
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    Vector u(region.num_params());
    for (Index k = 0; k < u.size(); ++k)
      u(k) = std::uniform_real_distribution<double>(region.u_lower(k), region.u_upper(k))(rng);
    const Multipliers m = alpha_beta_step(nominal.G, nominal.g, region.H(u), region.h(u));
    const MttResult mtt = mtt_feasibility(nominal.G, nominal.g, region.H(u), region.h(u));
    EXPECT_NEAR(m.objective, mtt.objective, 1e-6) << "trial " << trial;
    EXPECT_GE(m.objective, 0.0);
  }
}

TEST(ZStep, ZeroMultipliersStayNominal) {
  const Fixture f = load("twobus.json", UncertaintyMode::PhaseEntries, 0.2);
  const AffineRegion region = AffineRegion::build(f.bd, f.unc);
  Multipliers m;
  m.alpha = Matrix::Zero(region.H0.rows(), region.H0.cols());
  m.beta = Vector::Zero(region.H0.rows());
  EXPECT_EQ(z_step(m, region), region.u_nominal);
}

TEST(ZStep, SignPicksBound) {
  AffineRegion r = toy_region();
  Multipliers m;
  m.alpha = Matrix::Constant(1, 1, -1.0);  // coefficient -alpha * dH = +1
  m.beta = Vector::Ones(1);
  EXPECT_NEAR(z_step_coefficients(m, r)(0), 1.0, 1e-15);
  EXPECT_EQ(z_step(m, r)(0), 1.2);
  m.alpha(0, 0) = 1.0;
  EXPECT_EQ(z_step(m, r)(0), 0.8);
}

TEST(ZStep, MatchesLinearProgramOverBox) {
  std::mt19937_64 rng(77);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const int rows = std::uniform_int_distribution<int>(1, 5)(rng);
    const int dim = std::uniform_int_distribution<int>(1, 4)(rng);
    const int K = std::uniform_int_distribution<int>(1, 6)(rng);
    AffineRegion r;
    r.H0 = Matrix::Random(rows, dim);
    r.h0 = Vector::Random(rows);
    r.u_nominal = Vector::Random(K);
    r.u_lower = r.u_nominal.array() - 0.5;
    r.u_upper = r.u_nominal.array() + 0.3;
    for (int k = 0; k < K; ++k) {
      r.dH.push_back(Matrix::Random(rows, dim));
      r.dh.push_back(Vector::Random(rows));
    }
    Multipliers m;
    m.alpha = Matrix::NullaryExpr(rows, dim, [&] { return normal(rng); });
    m.beta = Vector::NullaryExpr(rows, [&] { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); });
    const Vector c = z_step_coefficients(m, r);
    LpProblem lp(K);
    lp.sense = Sense::Maximize;
    lp.cost = c;
    lp.lower = r.u_lower;
    lp.upper = r.u_upper;
    const LpSolution s = solve_lp(lp);
    ASSERT_TRUE(s.optimal());
    EXPECT_NEAR(c.dot(z_step(m, r)), s.objective, 1e-9);
    // The coefficient is the exact change of the objective per unit of u_k.
    auto objective = [&](const Vector& u) {
      return -(m.alpha.cwiseProduct(r.H(u))).sum() - m.beta.dot(r.h(u));
    };
    const Vector lo = r.u_lower;
    const Vector hi = r.u_upper;
    EXPECT_NEAR(objective(hi) - objective(lo), c.dot(hi - lo), 1e-9);
  }
}

TEST(StartingPoints, CountsAndOrder) {
  const Fixture f = load("twobus.json", UncertaintyMode::PhaseEntries, 0.2);
  const auto pts = starting_points(f.unc);
  ASSERT_EQ(pts.size(), 24u);
  EXPECT_EQ(pts[0](0), f.unc.lower()(0));
  EXPECT_EQ(pts[1](0), f.unc.upper()(0));
  EXPECT_EQ(pts[1].tail(11), f.unc.nominal().tail(11));
  EXPECT_EQ(starting_points(toy_region()).size(), 2u);
  const Fixture z = load("twobus.json", UncertaintyMode::PhaseEntries, 0.0);
  for (const Vector& p : starting_points(z.unc)) EXPECT_EQ(p, z.unc.nominal());
}

TEST(Bilp, ToyReachesGridOptimum) {
  const AffineRegion r = toy_region();
  RobustConfig cfg;
  // Exhaustive grid over u: max over x in [-1, 1] of (u x - 1), floored at zero.
  double grid = 0.0;
  for (int k = 0; k <= 400; ++k) grid = std::max(grid, std::max(0.0, 0.8 + 0.001 * k - 1.0));
  const WorstCaseSolution s = bilp_max(r.box, r, vec({1.2}), cfg, 1);
  EXPECT_NEAR(s.objective, grid, 1e-9);
  EXPECT_NEAR(s.u(0), 1.2, 1e-15);
  EXPECT_TRUE(s.converged);
  // From the other end the nominal-contained region gives no ascent direction.
  EXPECT_NEAR(bilp_max(r.box, r, vec({0.8}), cfg, 0).objective, 0.0, 1e-12);
}

TEST(Bilp, TraceIsMonotoneFromEveryStart) {
  const Fixture f = load("twobus.json", UncertaintyMode::PhaseEntries, 0.2);
  const AffineRegion region = AffineRegion::build(f.bd, f.unc);
  const Polytope initial = remove_redundant(region.polytope(region.u_nominal));
  RobustConfig cfg;
  double best = 0.0;
  const auto starts = starting_points(region);
  for (std::size_t s = 0; s < starts.size(); ++s) {
    const WorstCaseSolution w = bilp_max(initial, region, starts[s], cfg, static_cast<int>(s));
    for (std::size_t t = 1; t < w.trace.size(); ++t) EXPECT_GE(w.trace[t], w.trace[t - 1] - 1e-9);
    EXPECT_GE(w.objective, 0.0);
    best = std::max(best, w.objective);
  }
  EXPECT_GT(best, 0.0);
}

TEST(Bilp, NoUncertaintyGivesZero) {
  const Fixture f = load("twobus.json", UncertaintyMode::PhaseEntries, 0.0);
  const AffineRegion region = AffineRegion::build(f.bd, f.unc);
  const Polytope initial = remove_redundant(region.polytope(region.u_nominal));
  for (const Vector& u : starting_points(region)) {
    EXPECT_LE(bilp_max(initial, region, u, RobustConfig{}).objective, 1e-8);
  }
}

TEST(ComputeRfr, DegenerateDeltaReturnsNominalRegion) {
  const Fixture f = load("twobus.json", UncertaintyMode::PhaseEntries, 0.0);
  const RobustResult r = compute_rfr(f.bd, f.unc, RobustConfig{});
  EXPECT_TRUE(r.converged);
  ASSERT_EQ(r.iterations.size(), 1u);
  EXPECT_LE(r.iterations[0].max_objective, 1e-8);
  EXPECT_EQ(r.rfr.G, r.initial.G);
  EXPECT_EQ(r.rfr.g, r.initial.g);
}

TEST(ComputeRfr, TwoBusProperties) {
  const Fixture f = load("twobus.json", UncertaintyMode::PhaseEntries, 0.2);
  const RobustResult r = compute_rfr(f.bd, f.unc, RobustConfig{});
  ASSERT_TRUE(r.converged);
  EXPECT_LE(r.iterations.size(), 10u);
  for (std::size_t t = 1; t < r.iterations.size(); ++t)
    EXPECT_LE(r.iterations[t].max_objective, r.iterations[t - 1].max_objective + 1e-12);
  EXPECT_LE(r.iterations.back().max_objective, r.threshold);

  const SubsetResult inside = is_subset(r.rfr, r.initial);
  EXPECT_TRUE(inside.subset);
  EXPECT_LT(inside.margins.minCoeff(), 0.0);
  EXPECT_FALSE(is_subset(r.initial, r.rfr).subset);

  const AffineRegion region = AffineRegion::build(f.bd, f.unc);
  ASSERT_FALSE(r.solutions.empty());
  for (const CutSolution& s : r.solutions) {
    EXPECT_GT(s.objective, r.threshold);
    EXPECT_TRUE(is_subset(r.rfr, region.polytope(s.u)).subset);
    EXPECT_TRUE(((s.u - region.u_lower).array() >= -1e-12).all());
    EXPECT_TRUE(((region.u_upper - s.u).array() >= -1e-12).all());
  }
  for (const RowLabel& l : r.rfr.labels) {
    EXPECT_NE(l.kind, RowKind::Hull);
    if (l.iteration > 0) {
      EXPECT_GE(l.solution, 0);
    }
  }
}

TEST(ComputeRfr, CertainRowsNeverMove) {
  const Fixture f = load("twobus.json", UncertaintyMode::PhaseEntries, 0.2);
  const AffineRegion region = AffineRegion::build(f.bd, f.unc);
  const Polytope a = region.polytope(region.u_lower);
  const Polytope b = region.polytope(region.u_upper);
  for (Index i = 0; i < a.rows(); ++i) {
    if (!a.labels[static_cast<std::size_t>(i)].certain()) continue;
    EXPECT_EQ(a.G.row(i), b.G.row(i));
    EXPECT_EQ(a.g(i), b.g(i));
  }
}

TEST(ComputeRfr, DeterministicAcrossRunsAndThreads) {
  const Fixture f = load("twobus.json", UncertaintyMode::PhaseEntries, 0.2);
  RobustConfig one;
  RobustConfig two;
  two.threads = 2;
  const std::string a = result_document(compute_rfr(f.bd, f.unc, one), f.unc);
  const std::string b = result_document(compute_rfr(f.bd, f.unc, one), f.unc);
  const std::string c = result_document(compute_rfr(f.bd, f.unc, two), f.unc);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, c);
}

TEST(ComputeRfr, SubsetOfStartsIsSeeded) {
  const Fixture f = load("twobus.json", UncertaintyMode::PhaseEntries, 0.2);
  RobustConfig cfg;
  cfg.starts = 6;
  cfg.seed = 3;
  const RobustResult a = compute_rfr(f.bd, f.unc, cfg);
  const RobustResult b = compute_rfr(f.bd, f.unc, cfg);
  EXPECT_EQ(result_document(a, f.unc), result_document(b, f.unc));
  EXPECT_TRUE(is_subset(a.rfr, a.initial).subset);
}

TEST(ComputeRfr, EmptyNominalRegionIsReported) {
  Fixture f = load("twobus.json", UncertaintyMode::PhaseEntries, 0.0);
  f.net.customers[1].p_fixed = 500.0;
  f.bd = assemble_bundle(f.net);
  f.unc = build_uncertainty(f.net, f.bd, UncertaintyMode::PhaseEntries, 0.2);
  EXPECT_THROW(compute_rfr(f.bd, f.unc, RobustConfig{}), EmptyRegionError);
}

TEST(ComputeRfr, ConfigChecked) {
  RobustConfig cfg;
  cfg.objective_tol = -1.0;
  EXPECT_THROW(cfg.check(), std::invalid_argument);
}
