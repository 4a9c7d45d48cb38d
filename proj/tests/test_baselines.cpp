#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "scfdma/baselines.hpp"

using namespace scfdma;

namespace {

AssignmentInstance from_utilities(int n, const std::vector<std::vector<double>>& u) {
  const PatternSet ps(n);
  std::vector<std::vector<Option>> agents;
  for (const auto& row : u) {
    agents.emplace_back();
    for (std::size_t j = 0; j < ps.size(); ++j) agents.back().push_back({-row[j], ps[j], j, std::nullopt});
  }
  return AssignmentInstance(n, agents);
}

}  // namespace

TEST(BruteForce, SingleUserTakesFullBand) {
  const AssignmentInstance a = from_utilities(2, {{0.0, 4.0, 4.0, 1.0}});
  const BaselineResult r = brute_force(a);
  ASSERT_TRUE(r.feasible);
  EXPECT_EQ(r.choice, Choice{3});
  EXPECT_EQ(r.value, -1.0);
}

TEST(BruteForce, TwoByTwoPicksBestOfFourCovers) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  // columns: empty, {1}, {2}, {1,2}
  for (int t = 0; t < 200; ++t) {
    std::vector<std::vector<double>> w(2, std::vector<double>(4, 0.0));
    for (auto& row : w)
      for (int j = 1; j < 4; ++j) row[static_cast<std::size_t>(j)] = u(rng);
    const double covers[4] = {w[0][1] + w[1][2], w[0][2] + w[1][1], w[0][3], w[1][3]};
    const double best = *std::max_element(covers, covers + 4);
    const BaselineResult r = brute_force(from_utilities(2, w));
    ASSERT_TRUE(r.feasible);
    EXPECT_DOUBLE_EQ(-r.value, best);
  }
}

TEST(BruteForce, CeilingIsRefusedLoudly) {
  const AssignmentInstance a = from_utilities(4, std::vector<std::vector<double>>(3, std::vector<double>(11, 1.0)));
  EXPECT_THROW(brute_force(a, 5), SearchLimitError);
  const BaselineResult r = brute_force(a);
  EXPECT_GT(r.nodes, 5);
}

TEST(BruteForce, TiesResolveToFirstFound) {
  const AssignmentInstance a = from_utilities(2, {{0.0, 1.0, 1.0, 2.0}, {0.0, 1.0, 1.0, 2.0}});
  const BaselineResult r = brute_force(a);
  EXPECT_EQ(r.value, -2.0);
  EXPECT_EQ(r.choice, (Choice{0, 4 + 3}));  // lexicographically first of three optima
}

TEST(Greedy, SingleUserGetsFullBand) {
  const BaselineResult r = greedy(from_utilities(3, {{0, 1, 1, 1, 2, 2, 3}}));
  ASSERT_TRUE(r.feasible);
  EXPECT_EQ(r.choice, Choice{6});
}

TEST(Greedy, IntervalTrapLosesToOracle) {
  // user 1 grabs {1} first; user 2 only pays off with the whole band
  const AssignmentInstance a = from_utilities(2, {{0, 10, 0, 10}, {0, 9, 0, 30}});
  const BaselineResult g = greedy(a), o = brute_force(a);
  ASSERT_TRUE(g.feasible && o.feasible);
  EXPECT_EQ(-g.value, 10.0);
  EXPECT_EQ(-o.value, 30.0);
}

TEST(Greedy, AlwaysAnExactCover) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  for (int t = 0; t < 100; ++t) {
    const int n = 3 + t % 5, k = 1 + t % 4;
    const PatternSet ps(n);
    std::vector<std::vector<double>> w(static_cast<std::size_t>(k), std::vector<double>(ps.size(), 0.0));
    for (auto& row : w)
      for (std::size_t j = 1; j < ps.size(); ++j) row[j] = u(rng);
    const AssignmentInstance a = from_utilities(n, w);
    const BaselineResult r = greedy(a);
    EXPECT_TRUE(r.feasible);
    EXPECT_TRUE(a.violations(r.choice).empty());
    EXPECT_GE(r.value, brute_force(a).value);
  }
}

TEST(RoundRobin, Blocks) {
  EXPECT_EQ(round_robin_blocks(2, 4), (std::vector<Pattern>{{0, 2}, {2, 2}}));
  EXPECT_EQ(round_robin_blocks(3, 4), (std::vector<Pattern>{{0, 2}, {2, 1}, {3, 1}}));
  EXPECT_EQ(round_robin_blocks(4, 4).size(), 4u);
  EXPECT_THROW(round_robin_blocks(5, 4), InfeasibleError);
}

TEST(RoundRobin, IsAnExactCover) {
  for (int n = 1; n <= 12; ++n)
    for (int k = 1; k <= n; ++k)
      EXPECT_TRUE(validate_allocation(PatternSet(n), round_robin(k, n), static_cast<std::size_t>(k)).empty()) << k << ' ' << n;
}

TEST(RoundRobin, PicksCheapestOptionOnEachBlock) {
  const PatternSet ps(2);
  std::vector<std::vector<Option>> agents(2);
  for (int k = 0; k < 2; ++k)
    for (std::size_t j = 1; j < ps.size(); ++j)
      for (std::size_t m = 0; m < 2; ++m) agents[static_cast<std::size_t>(k)].push_back({m == 0 ? -1.0 : -3.0, ps[j], j, m});
  const AssignmentInstance a(2, agents);
  const BaselineResult r = round_robin(a);
  ASSERT_TRUE(r.feasible);
  EXPECT_EQ(r.value, -6.0);
  for (std::size_t o : r.choice) EXPECT_EQ(a.option(o).modulation, 1u);
}

TEST(RoundRobin, MissingOptionIsInfeasibleNotFatal) {
  const PatternSet ps(2);
  const AssignmentInstance a(2, {{{-1.0, ps[3], 3, std::nullopt}}, {{-1.0, ps[3], 3, std::nullopt}}});
  const BaselineResult r = round_robin(a);
  EXPECT_FALSE(r.feasible);
  EXPECT_FALSE(r.violations.empty());
}
