#include <gtest/gtest.h>

#include <random>

#include "hypwa/subset_vector.hpp"

using namespace hypwa;

namespace {

SubsetKey random_subset(std::mt19937_64& rng, int universe, int max_size) {
  std::vector<VertexId> ids;
  std::uniform_int_distribution<int> pick(0, universe - 1), len(0, max_size);
  const int k = len(rng);
  for (int i = 0; i < k; ++i) ids.push_back(static_cast<VertexId>(pick(rng)));
  return SubsetKey(std::move(ids));
}

// 1 - sum_{omega subset of S cap T} (-1)^|omega|, summed term by term.
std::int64_t alternating_sum(const SubsetKey& s, const SubsetKey& t) {
  const std::size_t c = intersection_size(s, t);
  std::int64_t sum = 0;
  for (std::uint64_t mask = 0; mask < (1ULL << c); ++mask) sum += (std::popcount(mask) % 2) ? -1 : 1;
  return 1 - sum;
}

}  // namespace

TEST(SubsetKey, Canonical) {
  const SubsetKey a{3, 1, 3, 2};
  EXPECT_EQ(a.size(), 3u);
  EXPECT_EQ(a.str(), "{1,2,3}");
  EXPECT_TRUE(SubsetKey({1, 3}).subset_of(a));
  EXPECT_FALSE(SubsetKey({4}).subset_of(a));
  EXPECT_EQ(intersection_size(a, SubsetKey{2, 3, 9}), 2u);
}

TEST(SubsetVector, NoStoredZeros) {
  SubsetVector v;
  v.set(SubsetKey{1}, 2.0);
  v.add(SubsetKey{1}, -2.0);
  EXPECT_TRUE(v.entries().empty());
  auto d = SubsetVector::delta(SubsetKey{1, 2});
  EXPECT_EQ((d + d).norm2(), 4.0);
  EXPECT_EQ((d - d).norm2(), 0.0);
}

TEST(SubsetVector, InnerConjugatesFirst) {
  SubsetVector a, b;
  a.set(SubsetKey{1}, std::complex<double>(0, 1));
  b.set(SubsetKey{1}, std::complex<double>(1, 0));
  EXPECT_EQ(inner(a, b), std::complex<double>(0, -1));
}

TEST(Xi, EmptySet) {
  EXPECT_TRUE(xi_vector(SubsetKey{}, XiSign::plus, false).entries().empty());
  const auto t = xi_vector(SubsetKey{}, XiSign::plus, true);
  EXPECT_EQ(t.entries().size(), 1u);
  EXPECT_EQ(t.at(SubsetKey{}), 1);
}

TEST(Xi, PairNorms) {
  const SubsetKey s{4, 7};
  EXPECT_EQ(xi_vector(s, XiSign::plus, true).norm2(), 4);
  EXPECT_EQ(xi_vector(s, XiSign::minus, true).norm2(), 4);
  EXPECT_EQ(xi_vector(s, XiSign::plus, false).norm2(), 3);
  EXPECT_EQ(xi_vector(s, XiSign::minus, false).norm2(), 3);
}

TEST(Xi, InnerCases) {
  EXPECT_EQ(xi_inner(SubsetKey{1}, SubsetKey{2}), 0);
  EXPECT_EQ(xi_inner(SubsetKey{5}, SubsetKey{5}), 1);
  EXPECT_EQ(xi_inner(SubsetKey{1, 2}, SubsetKey{1, 2, 3, 4}), 1);
  EXPECT_EQ(xi_inner(SubsetKey{}, SubsetKey{1, 2}), 0);
}

TEST(Xi, RandomAgainstAlternatingSum) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    const auto s = random_subset(rng, 10, 6), t = random_subset(rng, 10, 6);
    ASSERT_EQ(xi_inner(s, t), alternating_sum(s, t)) << s.str() << " " << t.str();
  }
}

TEST(Xi, ClosedFormMatchesMaterialized) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const auto s = random_subset(rng, 9, 7), t = random_subset(rng, 9, 7);
    for (auto fs : {XiSign::plus, XiSign::minus})
      for (auto gs : {XiSign::plus, XiSign::minus})
        for (bool ft : {false, true})
          for (bool gt : {false, true}) {
            const XiFactor f{s, fs, ft}, g{t, gs, gt};
            const std::int64_t direct = inner(xi_vector(f), xi_vector(g));
            ASSERT_EQ(xi_inner_exact(f, g), direct);
            ASSERT_EQ(xi_inner_closed(f, g), static_cast<double>(direct));
          }
  }
}

TEST(Xi, CapThrows) {
  std::vector<VertexId> ids(21);
  for (VertexId i = 0; i < 21; ++i) ids[i] = i;
  EXPECT_THROW(xi_vector(SubsetKey(ids), XiSign::plus, true), InputError);
  // the closed form has no cap
  const XiFactor f{SubsetKey(ids), XiSign::plus, true};
  EXPECT_EQ(xi_inner_exact(f, f), std::int64_t{1} << 21);
}

TEST(Tensor, ProductOfFactors) {
  const TensorVector a{{XiFactor{SubsetKey{1, 2}, XiSign::plus, false}, XiFactor{SubsetKey{3}, XiSign::plus, true}}};
  EXPECT_EQ(norm2(a), 3.0 * 2.0);
  const TensorVector b{{XiFactor{SubsetKey{2}, XiSign::minus, false}, XiFactor{SubsetKey{3, 4}, XiSign::minus, true}}};
  // <xi-_{2}, xi+_{1,2}> = 1, <xi~-_{3,4}, xi~+_{3}> = 1 + ((1-1)^1 - 1) = 0
  EXPECT_EQ(inner(b, a), 0.0);
  const TensorVector c{{XiFactor{SubsetKey{1}, XiSign::plus, false}}};
  EXPECT_THROW(inner(a, c), InputError);
}
