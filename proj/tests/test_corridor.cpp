#include <gtest/gtest.h>

#include <set>

#include "hypwa/corridor.hpp"
#include "hypwa/providers.hpp"
#include "oracles.hpp"

using namespace hypwa;

namespace {

std::shared_ptr<const RayTable> table_of(Graph g) { return std::make_shared<const RayTable>(std::move(g)); }

CorridorParams manual(double rho, int R1) {
  CorridorParams p;
  p.rho = rho;
  p.R0 = 1;
  p.R1 = R1;
  return p;
}

VertexId by_label(const Graph& g, const std::string& s) {
  const auto& l = g.labels();
  return static_cast<VertexId>(std::find(l.begin(), l.end(), s) - l.begin());
}

// T(x,k) straight from the definition, with Floyd-Warshall distances and the
// tail appended as ids n, n+1, ...
struct BruteCorridors {
  const RayTable& t;
  double rho;
  std::vector<std::vector<int>> d;

  BruteCorridors(const RayTable& table, double r) : t(table), rho(r), d(oracle::floyd_warshall(table.graph().adjacency())) {}

  std::set<VertexId> T(std::size_t i, int k) const {
    std::set<VertexId> out;
    if (k < 0) return out;
    const auto& ray = t.ray(i);
    const VertexId x = ray.origin;
    const auto n = static_cast<VertexId>(d.size());
    for (VertexId w = 0; w < n; ++w) {
      int to_ray = oracle::kInf;
      for (VertexId p : ray.path) to_ray = std::min(to_ray, d[w][p]);
      if (to_ray < rho && (d[x][w] == k || d[x][w] == k - 1)) out.insert(w);
    }
    const int dx = d[x][ray.path.back()];
    for (int s = 1; dx + s <= k; ++s)
      if (dx + s >= k - 1) out.insert(n + s - 1);
    return out;
  }

  bool W(std::size_t i, std::size_t j, int k, int l) const {
    const auto a = T(i, k), b = T(j, l);
    for (auto w : a)
      if (b.count(w)) return true;
    return false;
  }
};

}  // namespace

TEST(Params, PaperScaling) {
  const auto p = paper_params(HalfInt::from_twice(1));
  EXPECT_EQ(p.rho, 50.0);
  EXPECT_EQ(p.R0, 101);
  EXPECT_EQ(p.R1, 202);
  EXPECT_EQ(p.mode, ParamMode::paper);
  EXPECT_THROW(manual(0.0, 1).validate(), InputError);
  EXPECT_THROW(manual(1.0, -1).validate(), InputError);
}

TEST(Corridor, NegativeLevelEmpty) {
  auto t = table_of(gen_line(8));
  CorridorModel m(t, manual(0.5, 1));
  EXPECT_TRUE(m.members(0, -1).empty());
  EXPECT_TRUE(corridor_set(m, 4, -1).members.empty());
}

TEST(Corridor, LineCollapsesToRay) {
  auto t = table_of(gen_line(10));
  CorridorModel m(t, manual(0.5, 1));
  for (std::size_t i = 0; i < m.core_size(); ++i) {
    const auto& ray = t->ray(i);
    for (int k = 0; k < 14; ++k) {
      std::vector<VertexId> expect;
      if (k >= 1) expect.push_back(ray.at(k - 1));
      expect.push_back(ray.at(k));
      std::sort(expect.begin(), expect.end());
      EXPECT_EQ(m.members(i, k), expect) << i << " " << k;
    }
  }
}

TEST(Corridor, FreeGroupExample) {
  auto t = table_of(gen_free_group_ball(2, 2));
  CorridorModel m(t, manual(1.0, 1));
  const auto& g = t->graph();
  const auto s = corridor_set(m, by_label(g, "b"), 2);
  std::set<std::string> labels;
  for (auto w : s.members) labels.insert(g.label(w));
  EXPECT_EQ(labels, (std::set<std::string>{"e", "a"}));
  EXPECT_EQ(g.label(s.center), "a");
  EXPECT_EQ(s.enclosing_radius, 1);
}

TEST(Corridor, MatchesDefinition) {
  for (double rho : {0.5, 1.0, 1.5, 2.5}) {
    auto t = table_of(gen_cycle(9));
    CorridorModel m(t, manual(rho, 1));
    BruteCorridors brute(*t, rho);
    for (std::size_t i = 0; i < m.core_size(); ++i)
      for (int k = -1; k <= 12; ++k) {
        const auto got = m.members(i, k);
        const auto expect = brute.T(i, k);
        ASSERT_EQ(std::set<VertexId>(got.begin(), got.end()), expect) << rho << " " << i << " " << k;
        ASSERT_EQ(m.size(i, k), expect.size());
      }
  }
}

TEST(Relations, WZeroZeroDiagonal) {
  auto t = table_of(gen_free_group_ball(2, 2));
  CorridorModel m(t, manual(0.5, 1));
  const auto w = relation_W(m, 0, 0);
  for (std::size_t i = 0; i < w.dim; ++i) EXPECT_TRUE(w.at(i, i));
  EXPECT_EQ(w.count(), w.dim);
}

TEST(Relations, WMatchesBruteForceOnLine) {
  auto t = table_of(gen_line(20));
  CorridorModel m(t, manual(0.5, 1));
  BruteCorridors brute(*t, 0.5);
  for (int k = 0; k <= 6; ++k)
    for (int l = 0; l <= 6; ++l) {
      const auto w = relation_W(m, k, l);
      for (std::size_t i = 0; i < w.dim; ++i)
        for (std::size_t j = 0; j < w.dim; ++j) ASSERT_EQ(w.at(i, j), brute.W(i, j, k, l));
    }
}

TEST(Relations, WLevelsMatchIntersections) {
  auto t = table_of(gen_cycle(10));
  CorridorModel m(t, manual(1.5, 2));
  const int n_max = t->horizon();
  for (std::size_t i = 0; i < m.core_size(); ++i)
    for (std::size_t j = 0; j < m.core_size(); ++j) {
      const auto levels = m.w_levels(i, j, n_max);
      for (int n = 0; n <= n_max; ++n)
        for (int k = 0; k <= n; ++k) {
          const bool listed = std::binary_search(levels[n].begin(), levels[n].end(), k);
          ASSERT_EQ(listed, m.in_W(i, j, k, n - k));
        }
    }
}

TEST(Relations, EveryDistanceCovered) {
  auto t = table_of(gen_free_group_ball(2, 3));
  CorridorModel m(t, manual(0.5, 1));
  for (std::size_t i = 0; i < m.core_size(); ++i)
    for (std::size_t j = 0; j < m.core_size(); ++j) {
      const int n = t->dist(i)[t->core()[j]];
      bool some = false;
      for (int k = 0; k <= n; ++k) some = some || m.in_W(i, j, k, n - k);
      ASSERT_TRUE(some);
    }
}

TEST(Relations, ZIsMaxLevelOnFreeGroup) {
  auto t = table_of(gen_free_group_ball(2, 4));
  CorridorModel m(t, manual(0.5, 1));
  const int n_max = 6;
  ASSERT_LE(empirical_R1(m, n_max).R1, 1);
  // oracle: the largest k with (x,y) in W(k, n-k), by direct intersection
  std::vector<std::vector<std::vector<int>>> top(n_max + 1);
  for (int n = 0; n <= n_max; ++n) {
    top[n].assign(m.core_size(), std::vector<int>(m.core_size(), -1));
    for (std::size_t i = 0; i < m.core_size(); ++i)
      for (std::size_t j = 0; j < m.core_size(); ++j)
        for (int k = n; k >= 0; --k)
          if (m.in_W(i, j, k, n - k)) {
            top[n][i][j] = k;
            break;
          }
  }
  for (int n = 0; n <= n_max; ++n)
    for (int k = 0; k <= n; ++k) {
      const auto z = relation_Z(m, k, n - k);
      for (std::size_t i = 0; i < z.dim; ++i)
        for (std::size_t j = 0; j < z.dim; ++j) ASSERT_EQ(z.at(i, j), top[n][i][j] == k) << n << " " << k;
    }
}

TEST(Relations, NoWMeansNoZ) {
  auto t = table_of(gen_cycle(8));
  CorridorModel m(t, manual(0.5, 3));
  for (int n = 0; n <= 6; ++n)
    for (std::size_t i = 0; i < m.core_size(); ++i)
      for (std::size_t j = 0; j < m.core_size(); ++j) {
        bool any_w = false, any_z = false;
        for (int k = 0; k <= n; ++k) {
          any_w = any_w || m.in_W(i, j, k, n - k);
          any_z = any_z || m.in_Z(i, j, k, n - k);
        }
        if (!any_w) {
          ASSERT_FALSE(any_z);
        }
      }
}

TEST(BitMatrix, Rows) {
  auto t = table_of(gen_line(2));
  CorridorModel m(t, manual(0.5, 1));
  std::ostringstream os;
  write_bit_matrix(os, relation_W(m, 0, 0));
  EXPECT_EQ(os.str(), "100\n010\n001\n");
}

TEST(R1, TreeSmall) {
  auto t = table_of(gen_regular_tree(2, 5));
  for (double rho : {0.5, 1.0}) {
    CorridorModel m(t, manual(rho, 1));
    EXPECT_LE(empirical_R1(m, t->horizon()).R1, 1);
  }
}

TEST(R1, LineAtHalf) {
  auto t = table_of(gen_line(16));
  CorridorModel m(t, manual(0.5, 1));
  EXPECT_LE(empirical_R1(m, t->horizon()).R1, 1);
}

TEST(R1, PaperBoundChecked) {
  auto t = table_of(gen_line(6));
  CorridorModel m(t, paper_params(HalfInt(0) + HalfInt::from_twice(1)));
  const auto r = empirical_R1(m, 8);
  EXPECT_TRUE(r.bound_checked);
  EXPECT_TRUE(r.within_bound);
}

TEST(Partition, BelowDistanceIsZeroAndTreeHasOne) {
  auto t = table_of(gen_regular_tree(2, 5));
  CorridorModel m(t, manual(0.5, 1));
  for (std::size_t i = 0; i < m.core_size(); ++i)
    for (std::size_t j = 0; j < m.core_size(); ++j) {
      const int d = t->dist(i)[t->core()[j]];
      for (int n = 0; n <= d; ++n) {
        int count = 0;
        for (int k = 0; k <= n; ++k) count += m.in_Z(i, j, k, n - k);
        ASSERT_EQ(count, n == d ? 1 : 0);
      }
    }
}

TEST(Partition, FreeGroupRadiusThree) {
  auto t = table_of(gen_free_group_ball(2, 3));
  CorridorModel m(t, manual(0.5, 1));
  const auto r = verify_partition(m, t->horizon());
  EXPECT_TRUE(r.passed);
  EXPECT_EQ(r.violation_count, 0u);
  EXPECT_EQ(r.pairs_checked, m.core_size() * m.core_size());
  EXPECT_TRUE(covering_check(m, t->horizon()).passed);
}

TEST(Covering, DiagonalAndWideCorridor) {
  auto t = table_of(gen_cycle(8));
  CorridorModel narrow(t, manual(0.5, 1));
  const auto bad = covering_check(narrow, t->horizon(), 3);
  EXPECT_FALSE(bad.passed);
  EXPECT_GT(bad.violation_count, 0u);
  EXPECT_LE(bad.violations.size(), 3u);
  // rho past the diameter puts every snapshot vertex in every corridor
  CorridorModel wide(t, manual(5.0, 8));
  EXPECT_TRUE(covering_check(wide, t->horizon()).passed);
  EXPECT_TRUE(verify_partition(wide, t->horizon()).passed);
}

TEST(Calibration, MinimalRhoIsFirstPassingGridPoint) {
  auto t = table_of(gen_cycle(8));
  const auto grid = rho_grid(*t);
  double first = -1;
  for (double rho : grid) {
    if (covering_check(CorridorModel(t, manual(rho, 1)), t->horizon()).passed) {
      first = rho;
      break;
    }
  }
  EXPECT_EQ(minimal_rho(t, t->horizon(), grid), first);
  const auto p = calibrate_empirical(t, HalfInt(2));
  EXPECT_EQ(p.rho, first);
  EXPECT_EQ(p.mode, ParamMode::empirical);
  CorridorModel m(t, p);
  EXPECT_TRUE(verify_partition(m, t->horizon()).passed);
  EXPECT_EQ(p.R0, max_enclosing_radius(m) + 1);
}

TEST(Calibration, TreesNeedHalf) {
  for (auto g : {gen_free_group_ball(2, 3), gen_line(12), gen_regular_tree(3, 3)}) {
    auto t = table_of(std::move(g));
    const auto p = calibrate_empirical(t, HalfInt(1));
    EXPECT_EQ(p.rho, 0.5);
    EXPECT_LE(p.R1, 1);
    EXPECT_EQ(CorridorModel(t, p).max_corridor_size(), 2u);
  }
}

TEST(Calibration, EnclosingBallRadius) {
  auto t = table_of(gen_free_group_ball(2, 3));
  CorridorModel m(t, manual(0.5, 1));
  const int r = max_enclosing_radius(m);
  EXPECT_EQ(r, 1);
  for (VertexId x : t->core())
    for (int k = 0; k <= 4; ++k) EXPECT_LE(corridor_set(m, x, k).enclosing_radius, r);
}
