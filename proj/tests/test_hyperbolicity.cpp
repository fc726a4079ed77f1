#include <gtest/gtest.h>

#include <sstream>

#include "hypwa/hyperbolicity.hpp"
#include "hypwa/providers.hpp"
#include "oracles.hpp"

using namespace hypwa;

namespace {

Graph petersen() {
  std::istringstream in("0 1\n1 2\n2 3\n3 4\n4 0\n0 5\n1 6\n2 7\n3 8\n4 9\n5 7\n7 9\n9 6\n6 8\n8 5\n");
  return parse_edge_list(in).graph;
}

}  // namespace

TEST(Profile, TreesAreZero) {
  for (const auto& g : {gen_regular_tree(3, 3), gen_free_group_ball(2, 2), gen_line(9)}) {
    DistanceOracle d(g);
    const auto p = hyperbolicity_profile(d, ProfileMode::exact);
    EXPECT_EQ(p.delta_thin, HalfInt(0)) << g.provider();
    EXPECT_EQ(p.delta_four_point, HalfInt(0)) << g.provider();
    EXPECT_FALSE(p.sampled);
  }
}

TEST(Profile, Cycle12) {
  const auto g = gen_cycle(12);
  // brute force over every triangle and every choice of sides: 3 and 3
  EXPECT_EQ(oracle::thin_delta(g.adjacency()), 3);
  EXPECT_EQ(oracle::four_point_twice(g.adjacency()), 6);
  DistanceOracle d(g);
  const auto p = hyperbolicity_profile(d, ProfileMode::exact);
  EXPECT_EQ(p.delta_thin, HalfInt(3));
  EXPECT_EQ(p.delta_four_point, HalfInt(3));
  EXPECT_GE(p.delta_impl, p.delta_thin);
}

TEST(Profile, Petersen) {
  const auto g = petersen();
  EXPECT_EQ(oracle::thin_delta(g.adjacency()), 1);
  EXPECT_EQ(oracle::four_point_twice(g.adjacency()), 1);
  DistanceOracle d(g);
  const auto p = hyperbolicity_profile(d, ProfileMode::exact);
  EXPECT_EQ(p.delta_thin, HalfInt(1));
  EXPECT_EQ(p.delta_four_point, HalfInt::from_twice(1));
}

TEST(Profile, SmallCyclesAgreeWithBruteForce) {
  for (int n = 3; n <= 9; ++n) {
    const auto g = gen_cycle(n);
    DistanceOracle d(g);
    const auto p = hyperbolicity_profile(d, ProfileMode::exact);
    EXPECT_EQ(p.delta_thin.twice(), 2 * oracle::thin_delta(g.adjacency())) << n;
    EXPECT_EQ(p.delta_four_point.twice(), oracle::four_point_twice(g.adjacency())) << n;
  }
}

TEST(Profile, SampledIsLowerBoundAndSeeded) {
  const auto g = gen_cycle(16);
  DistanceOracle d(g);
  const auto exact = hyperbolicity_profile(d, ProfileMode::exact);
  const auto a = hyperbolicity_profile(d, ProfileMode::sampled, 300, 7);
  const auto b = hyperbolicity_profile(d, ProfileMode::sampled, 300, 7);
  EXPECT_TRUE(a.sampled);
  EXPECT_LE(a.delta_thin, exact.delta_thin);
  EXPECT_LE(a.delta_four_point, exact.delta_four_point);
  EXPECT_EQ(a.delta_thin, b.delta_thin);
  EXPECT_EQ(a.delta_four_point, b.delta_four_point);
}

TEST(Profile, Override) {
  const auto g = gen_cycle(6);
  DistanceOracle d(g);
  const auto p = hyperbolicity_profile(d, ProfileMode::exact, 100, 0, HalfInt(5));
  EXPECT_EQ(p.delta_impl, HalfInt(5));
}

TEST(Thinness, TreeSlackIsZero) {
  const auto g = gen_regular_tree(3, 3);
  DistanceOracle d(g);
  const auto r = thinness_check(d, HalfInt(0), ProfileMode::exact);
  EXPECT_TRUE(r.passed);
  EXPECT_EQ(r.worst_slack, HalfInt(0));
  const auto core = g.core();
  for (auto x : core)
    for (auto y : core)
      for (auto w : core) ASSERT_EQ(HalfInt(farthest_geodesic_distance(d, w, x, y)), gromov_product(d, x, y, w));
}

TEST(Thinness, DiameterAlwaysPasses) {
  const auto g = gen_cycle(10);
  DistanceOracle d(g);
  EXPECT_TRUE(thinness_check(d, HalfInt(5), ProfileMode::exact, 0, 0, 1).passed);
}

TEST(Thinness, Cycle12WithProfileDelta) {
  const auto g = gen_cycle(12);
  DistanceOracle d(g);
  const auto p = hyperbolicity_profile(d, ProfileMode::exact);
  EXPECT_TRUE(thinness_check(d, p.delta_impl, ProfileMode::exact).passed);
}

TEST(Thinness, ViolationReported) {
  // multiplier 0 and delta 0 on a cycle: tripod inequality fails
  const auto g = gen_cycle(12);
  DistanceOracle d(g);
  const auto r = thinness_check(d, HalfInt(0), ProfileMode::exact, 0, 0, 0, 4);
  EXPECT_FALSE(r.passed);
  EXPECT_LE(r.violations.size(), 4u);
  for (const auto& v : r.violations) EXPECT_GT(HalfInt(v.distance), v.allowance);
}
