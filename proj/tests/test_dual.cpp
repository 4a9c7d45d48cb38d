#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "scfdma/dual.hpp"
#include "scfdma/verify.hpp"

using namespace scfdma;

namespace {

AssignmentInstance single(double u) { return AssignmentInstance(1, {{{-u, Pattern{0, 1}, 1, std::nullopt}}}); }

/// K=1, N=1, options {empty, {1}} with U = [0, u].
AssignmentInstance pair_instance(double u) {
  return AssignmentInstance(1, {{{0.0, Pattern{}, 0, std::nullopt}, {-u, Pattern{0, 1}, 1, std::nullopt}}});
}

DualPoint point(std::vector<double> eps, std::vector<double> lam, std::vector<double> rho) {
  auto v = [](const std::vector<double>& x) { return Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size())).eval(); };
  return {v(eps), v(lam), v(rho)};
}

}  // namespace

TEST(DualValue, HandSubstitution) {
  EXPECT_DOUBLE_EQ(dual_value(single(1.0), point({0}, {0}, {1})), -1.0);
}

TEST(DualValue, ZeroUtilitiesGiveQuarterRhoSum) {
  const AssignmentInstance a(3, {{{0.0, Pattern{}, 0, std::nullopt}, {0.0, Pattern{0, 3}, 6, std::nullopt}},
                                 {{0.0, Pattern{}, 0, std::nullopt}, {0.0, Pattern{1, 1}, 2, std::nullopt}}});
  const DualPoint d = point({0, 0, 0}, {0, 0}, {0.5, 1.5, 2.0, 4.0});
  EXPECT_DOUBLE_EQ(dual_value(a, d), -0.25 * 8.0);
}

TEST(DualValue, ZeroRhoIsADomainError) {
  EXPECT_THROW(dual_value(single(1.0), point({0}, {0}, {0})), NumericError);
  EXPECT_THROW(recover_indicator(single(1.0), point({0}, {0}, {0})), NumericError);
  EXPECT_THROW(dual_gradient(single(1.0), point({0}, {0}, {0})), NumericError);
}

TEST(DualValue, ShapeMismatchIsRejected) {
  EXPECT_THROW(dual_value(single(1.0), point({0, 0}, {0}, {1})), std::invalid_argument);
}

TEST(RecoverIndicator, ReducedWeightAtPlusMinusRhoAndZero) {
  // r = U - lam - eps = 5 - lam - 1 with rho = 2
  const AssignmentInstance a = single(5.0);
  EXPECT_DOUBLE_EQ(recover_indicator(a, point({1}, {2}, {2}))[0], 1.0);
  EXPECT_DOUBLE_EQ(recover_indicator(a, point({1}, {6}, {2}))[0], 0.0);
  EXPECT_DOUBLE_EQ(recover_indicator(a, point({1}, {4}, {2}))[0], 0.5);
}

TEST(DualGradient, VanishesAtBinaryFeasibleRecovery) {
  const AssignmentInstance a = pair_instance(5.0);
  const DualPoint d = point({1}, {1}, {1, 3});
  const Eigen::VectorXd x = recover_indicator(a, d);
  EXPECT_DOUBLE_EQ(x[0], 0.0);
  EXPECT_DOUBLE_EQ(x[1], 1.0);
  const DualGradient g = dual_gradient(a, d);
  EXPECT_DOUBLE_EQ(g.sup_norm(), 0.0);
}

TEST(DualGradient, RhoComponentZeroIffReducedWeightMatchesRho) {
  const AssignmentInstance a = single(5.0);
  EXPECT_DOUBLE_EQ(dual_gradient(a, point({1}, {2}, {2})).rho[0], 0.0);
  EXPECT_DOUBLE_EQ(dual_gradient(a, point({1}, {6}, {2})).rho[0], 0.0);
  const double g = dual_gradient(a, point({1}, {3}, {2})).rho[0];
  EXPECT_DOUBLE_EQ(g, 0.25 * (0.25 - 1.0));
}

TEST(DualGradient, AgreesWithCentralDifferences) {
  SweepConfig cfg;
  cfg.instances = 6;
  for (ProblemKind p : {ProblemKind::sumax, ProblemKind::jamsc}) {
    cfg.problem = p;
    const GradcheckSummary s = gradcheck_sweep(cfg, 50, 1e-6, 99);
    EXPECT_EQ(s.points, 300);
    EXPECT_LE(s.worst, 1e-6) << name(p);
  }
}

TEST(DualValue, ConcaveAlongRandomSegments) {
  SweepConfig cfg;
  cfg.instances = 6;
  EXPECT_LE(concavity_violation(cfg, 50, 5), 1e-9);
}

TEST(Complementarity, MinimizedValueEqualsDual) {
  const AssignmentInstance a = sweep_instance(SweepConfig{}, 3);
  std::mt19937_64 rng(1);
  const DualPoint d = random_cone_point(a, rng);
  const Eigen::VectorXd x = recover_indicator(a, d);
  EXPECT_NEAR(complementarity(a, x, d), dual_value(a, d), 1e-9 * (1 + std::abs(dual_value(a, d))));
  Eigen::VectorXd off = x;
  off[0] += 0.1;
  EXPECT_GT(complementarity(a, off, d), complementarity(a, x, d));
}

TEST(ProjectRho, SignFlipRule) {
  Eigen::VectorXd prev(3), prop(3);
  prev << 0.3, -0.3, 1.0;
  prop << 0.0, 0.0, 2.0;
  const Eigen::VectorXd out = project_rho(prev, prop, 0.01);
  EXPECT_DOUBLE_EQ(out[0], 0.31);
  EXPECT_DOUBLE_EQ(out[1], -0.31);
  EXPECT_DOUBLE_EQ(out[2], 2.0);
  EXPECT_THROW(project_rho(prev, prop, 0.0), std::invalid_argument);
}

TEST(ProjectRho, PositiveFloor) {
  Eigen::VectorXd prop(3);
  prop << -1.0, 0.0, 0.5;
  const Eigen::VectorXd out = project_rho_positive(prop, 1e-9);
  EXPECT_EQ(out[0], 1e-9);
  EXPECT_EQ(out[1], 1e-9);
  EXPECT_EQ(out[2], 0.5);
}

TEST(Binarize, RoundsWithinToleranceAndChecksCover) {
  const AssignmentInstance a = pair_instance(5.0);
  Eigen::VectorXd x(2);
  x << 0.05, 0.97;
  Binarization b = binarize(a, x, 0.1);
  EXPECT_TRUE(b.binary && b.feasible);
  EXPECT_EQ(b.choice, Choice{1});
  x << 0.97, 0.05;  // leaves the resource uncovered
  b = binarize(a, x, 0.1);
  EXPECT_TRUE(b.binary);
  EXPECT_FALSE(b.feasible);
  x << 0.5, 0.5;
  b = binarize(a, x, 0.1);
  EXPECT_FALSE(b.binary);
  EXPECT_FALSE(b.violations.empty());
}

TEST(Repair, ProducesAnExactCover) {
  SweepConfig cfg;
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 30; ++i) {
    const AssignmentInstance a = sweep_instance(cfg, i);
    Eigen::VectorXd x(static_cast<Eigen::Index>(a.n_options()));
    for (Eigen::Index o = 0; o < x.size(); ++o) x[o] = u(rng);
    const Repair r = repair_allocation(a, x);
    EXPECT_TRUE(r.feasible) << i;
    EXPECT_TRUE(a.violations(r.choice).empty()) << i;
  }
}

TEST(Polish, NeverWorseAndStaysFeasible) {
  SweepConfig cfg;
  cfg.problem = ProblemKind::jamsc;
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int improved = 0;
  for (int i = 0; i < 60; ++i) {
    const AssignmentInstance a = sweep_instance(cfg, i);
    Eigen::VectorXd x(static_cast<Eigen::Index>(a.n_options()));
    for (Eigen::Index o = 0; o < x.size(); ++o) x[o] = u(rng);
    const Repair r = repair_allocation(a, x);
    if (!r.feasible) continue;
    const Choice p = polish_allocation(a, r.choice);
    EXPECT_TRUE(a.violations(p).empty()) << i;
    EXPECT_LE(a.objective(p), a.objective(r.choice)) << i;
    improved += a.objective(p) < a.objective(r.choice);
  }
  EXPECT_GT(improved, 0);
}

TEST(Polish, ShiftsBoundaryTowardCheaperSplit) {
  // two agents on 2 resources, each prefers the whole band but {1},{2} beats {1,2},{}
  const PatternSet ps(2);
  const AssignmentInstance a(2, {{{0.0, ps[0], 0, std::nullopt}, {-3.0, ps[1], 1, std::nullopt}, {-1.0, ps[2], 2, std::nullopt}, {-4.0, ps[3], 3, std::nullopt}},
                                 {{0.0, ps[0], 0, std::nullopt}, {-1.0, ps[1], 1, std::nullopt}, {-3.0, ps[2], 2, std::nullopt}, {-4.0, ps[3], 3, std::nullopt}}});
  const Choice start{3, 4};  // agent 0 holds both
  const Choice p = polish_allocation(a, start);
  EXPECT_EQ(a.objective(p), -6.0);
}
