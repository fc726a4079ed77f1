#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "hypwa/graph.hpp"

namespace hypwa {

enum class ProfileMode { exact, sampled };

struct HyperbolicityProfile {
  /// Largest distance from a point of one side to the union of the other two,
  /// over geodesic triangles with core corners.
  HalfInt delta_thin;
  /// max of min(<x,y>_w, <y,z>_w) - <x,z>_w, clipped at 0.
  HalfInt delta_four_point;
  bool sampled = false;
  /// The delta handed to downstream modules.
  HalfInt delta_impl;
  std::uint64_t triangles_checked = 0;
  std::uint64_t quadruples_checked = 0;
};

namespace detail {

// Thinness of the side [a,b] of the triangle (a,b,c), maximised over all
// choices of the three geodesics.
inline int side_thinness(const DistanceOracle& d, VertexId a, VertexId b, VertexId c) {
  int worst = 0;
  for (VertexId u : geodesic_interval(d, a, b)) {
    const int to_bc = farthest_geodesic_distance(d, u, b, c);
    const int to_ca = farthest_geodesic_distance(d, u, c, a);
    worst = std::max(worst, std::min(to_bc, to_ca));
  }
  return worst;
}

inline int triangle_thinness(const DistanceOracle& d, VertexId x, VertexId y, VertexId w) {
  return std::max({side_thinness(d, x, y, w), side_thinness(d, y, w, x), side_thinness(d, w, x, y)});
}

inline std::int64_t four_point_twice(const DistanceOracle& d, VertexId x, VertexId y, VertexId z, VertexId w) {
  const auto xy = gromov_product(d, x, y, w).twice();
  const auto yz = gromov_product(d, y, z, w).twice();
  const auto xz = gromov_product(d, x, z, w).twice();
  return std::max<std::int64_t>(0, std::min(xy, yz) - xz);
}

}  // namespace detail

/// Thin-triangle and four-point constants over the core. Exact mode
/// enumerates every core triple and quadruple; sampled mode draws
/// `sample_budget` of each with the given seed.
inline HyperbolicityProfile hyperbolicity_profile(const DistanceOracle& d, ProfileMode mode,
                                                  std::uint64_t sample_budget = 20000, std::uint64_t seed = 0,
                                                  std::optional<HalfInt> delta_override = std::nullopt) {
  const auto core = d.graph().core();
  const std::size_t n = core.size();
  HyperbolicityProfile p;
  std::int64_t thin = 0;
  std::int64_t four = 0;

  if (mode == ProfileMode::exact) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j)
        for (std::size_t k = j; k < n; ++k) {
          thin = std::max<std::int64_t>(thin, detail::triangle_thinness(d, core[i], core[j], core[k]));
          ++p.triangles_checked;
        }
    for (VertexId w : core)
      for (VertexId x : core)
        for (VertexId y : core)
          for (VertexId z : core) {
            four = std::max(four, detail::four_point_twice(d, x, y, z, w));
            ++p.quadruples_checked;
          }
  } else {
    p.sampled = true;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (std::uint64_t s = 0; s < sample_budget; ++s) {
      thin = std::max<std::int64_t>(thin, detail::triangle_thinness(d, core[pick(rng)], core[pick(rng)], core[pick(rng)]));
      ++p.triangles_checked;
    }
    for (std::uint64_t s = 0; s < sample_budget; ++s) {
      const VertexId x = core[pick(rng)], y = core[pick(rng)], z = core[pick(rng)], w = core[pick(rng)];
      four = std::max(four, detail::four_point_twice(d, x, y, z, w));
      ++p.quadruples_checked;
    }
  }
  p.delta_thin = HalfInt(thin);
  p.delta_four_point = HalfInt::from_twice(four);
  p.delta_impl = delta_override ? *delta_override : std::max(p.delta_thin, HalfInt(1));
  return p;
}

struct ThinnessViolation {
  VertexId x, y, w;
  int distance;      // max over geodesics [x,y] of d(w,[x,y])
  HalfInt allowance; // <x,y>_w + multiplier * delta
};

struct ThinnessReport {
  bool passed = true;
  bool sampled = false;
  HalfInt worst_slack;
  VertexId worst_x = 0, worst_y = 0, worst_w = 0;
  std::uint64_t triples_checked = 0;
  std::vector<ThinnessViolation> violations;
};

/// Checks d(w,[x,y]) <= <x,y>_w + multiplier * delta for every geodesic [x,y].
/// Exact mode covers all core triples with x <= y.
inline ThinnessReport thinness_check(const DistanceOracle& d, HalfInt delta, ProfileMode mode,
                                     std::uint64_t sample_budget = 20000, std::uint64_t seed = 0,
                                     int multiplier = 10, std::size_t max_violations = 16) {
  const auto core = d.graph().core();
  const std::size_t n = core.size();
  ThinnessReport r;
  r.sampled = mode == ProfileMode::sampled;
  bool first = true;

  auto visit = [&](VertexId x, VertexId y, VertexId w) {
    const int dist = farthest_geodesic_distance(d, w, x, y);
    const HalfInt allowance = gromov_product(d, x, y, w) + HalfInt::from_twice(delta.twice() * multiplier);
    const HalfInt slack = allowance - HalfInt(dist);
    ++r.triples_checked;
    if (first || slack < r.worst_slack) {
      first = false;
      r.worst_slack = slack;
      r.worst_x = x;
      r.worst_y = y;
      r.worst_w = w;
    }
    if (slack < HalfInt(0)) {
      r.passed = false;
      if (r.violations.size() < max_violations) r.violations.push_back({x, y, w, dist, allowance});
    }
  };

  if (mode == ProfileMode::exact) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j)
        for (VertexId w : core) visit(core[i], core[j], w);
  } else {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (std::uint64_t s = 0; s < sample_budget; ++s) visit(core[pick(rng)], core[pick(rng)], core[pick(rng)]);
  }
  return r;
}

}  // namespace hypwa
