#pragma once

// Immutable graph snapshots, BFS distances, Gromov products, geodesics and
// the rays p / p_x.
//
// A snapshot is a finite connected simple graph with a base point o and a
// core radius: vertices within that distance of o are the ones whose pairs
// take part in every relation and report. The designated base ray p ends at
// a snapshot vertex; past that vertex it is continued by a virtual pendant
// ray whose vertices get the ids n, n+1, ... (n = vertex count). Distances
// to virtual vertices are analytic, so every ray is an honest infinite
// geodesic and the snapshot's own distances are untouched.

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hypwa/error.hpp"

namespace hypwa {

using VertexId = std::uint32_t;

inline constexpr int kUnreached = -1;

/// Exact value in (1/2)Z, stored as twice the value.
class HalfInt {
 public:
  constexpr HalfInt() = default;
  constexpr explicit HalfInt(std::int64_t whole) : twice_(2 * whole) {}

  static constexpr HalfInt from_twice(std::int64_t twice) {
    HalfInt h;
    h.twice_ = twice;
    return h;
  }

  constexpr std::int64_t twice() const { return twice_; }
  constexpr double to_double() const { return static_cast<double>(twice_) / 2.0; }
  constexpr bool is_integer() const { return twice_ % 2 == 0; }

  constexpr auto operator<=>(const HalfInt&) const = default;

  constexpr HalfInt operator+(HalfInt o) const { return from_twice(twice_ + o.twice_); }
  constexpr HalfInt operator-(HalfInt o) const { return from_twice(twice_ - o.twice_); }

  std::string str() const {
    if (is_integer()) return std::to_string(twice_ / 2);
    const std::int64_t whole = twice_ / 2;
    const bool negative = twice_ < 0;
    std::string s = std::to_string(std::llabs(whole)) + ".5";
    return (negative ? "-" : "") + s;
  }

 private:
  std::int64_t twice_ = 0;
};

/// BFS distances from `source`; unreachable vertices get kUnreached.
template <class Adjacency>
std::vector<int> bfs_from(const Adjacency& adjacency, std::span<const VertexId> sources) {
  std::vector<int> dist(adjacency.size(), kUnreached);
  std::vector<VertexId> queue;
  queue.reserve(adjacency.size());
  for (VertexId s : sources) {
    if (dist[s] == kUnreached) {
      dist[s] = 0;
      queue.push_back(s);
    }
  }
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const VertexId v = queue[head];
    for (VertexId u : adjacency[v]) {
      if (dist[u] == kUnreached) {
        dist[u] = dist[v] + 1;
        queue.push_back(u);
      }
    }
  }
  return dist;
}

class Graph {
 public:
  using Adjacency = std::vector<std::vector<VertexId>>;

  /// Validates symmetry, irreflexivity and connectivity; sorts and
  /// deduplicates neighbor lists. A non-empty `base_ray` must be a geodesic.
  Graph(Adjacency adjacency, VertexId base_point, int core_radius,
        std::vector<VertexId> base_ray = {}, std::vector<std::string> labels = {},
        std::string provider = "custom", bool cayley = false)
      : adjacency_(std::move(adjacency)),
        base_point_(base_point),
        core_radius_(core_radius),
        base_ray_(std::move(base_ray)),
        labels_(std::move(labels)),
        provider_(std::move(provider)),
        cayley_(cayley) {
    const std::size_t n = adjacency_.size();
    if (n == 0) throw GraphError("graph has no vertices");
    if (base_point_ >= n) throw InputError("base point " + std::to_string(base_point_) + " is not a vertex");
    if (!labels_.empty() && labels_.size() != n) throw InputError("label table size does not match vertex count");
    for (VertexId v = 0; v < n; ++v) {
      auto& nbrs = adjacency_[v];
      std::sort(nbrs.begin(), nbrs.end());
      nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
      for (VertexId u : nbrs) {
        if (u >= n) throw InputError("edge to unknown vertex " + std::to_string(u));
        if (u == v) throw GraphError("self-loop at vertex " + std::to_string(v));
      }
      edge_count_ += nbrs.size();
    }
    for (VertexId v = 0; v < n; ++v) {
      for (VertexId u : adjacency_[v]) {
        if (!std::binary_search(adjacency_[u].begin(), adjacency_[u].end(), v)) {
          throw GraphError("asymmetric adjacency between " + std::to_string(v) + " and " + std::to_string(u));
        }
      }
    }
    edge_count_ /= 2;

    const VertexId src[1] = {base_point_};
    depth_ = bfs_from(adjacency_, src);
    for (VertexId v = 0; v < n; ++v) {
      if (depth_[v] == kUnreached) throw GraphError("graph is disconnected: vertex " + std::to_string(v) + " unreachable");
      eccentricity_ = std::max(eccentricity_, depth_[v]);
    }
    if (core_radius_ < 0 || core_radius_ > eccentricity_) {
      throw GraphError("core radius " + std::to_string(core_radius_) + " outside [0, " +
                       std::to_string(eccentricity_) + "]");
    }
    for (VertexId v = 0; v < n; ++v) {
      if (depth_[v] <= core_radius_) core_.push_back(v);
    }

    if (!base_ray_.empty()) {
      for (VertexId v : base_ray_) {
        if (v >= n) throw InputError("base ray vertex " + std::to_string(v) + " is not a vertex");
      }
      const VertexId start[1] = {base_ray_.front()};
      const auto d = bfs_from(adjacency_, start);
      for (std::size_t i = 0; i < base_ray_.size(); ++i) {
        if (d[base_ray_[i]] != static_cast<int>(i)) throw GraphError("base ray is not a geodesic");
      }
    }
  }

  std::size_t vertex_count() const { return adjacency_.size(); }
  std::size_t edge_count() const { return edge_count_; }
  const Adjacency& adjacency() const { return adjacency_; }

  std::span<const VertexId> neighbors(VertexId v) const {
    check_vertex(v);
    return adjacency_[v];
  }

  VertexId base_point() const { return base_point_; }
  int core_radius() const { return core_radius_; }
  int base_eccentricity() const { return eccentricity_; }

  /// Distance from the base point.
  int depth(VertexId v) const {
    check_vertex(v);
    return depth_[v];
  }

  bool has_base_ray() const { return !base_ray_.empty(); }
  std::span<const VertexId> base_ray() const { return base_ray_; }

  std::span<const VertexId> core() const { return core_; }
  bool in_core(VertexId v) const { return v < adjacency_.size() && depth_[v] <= core_radius_; }

  const std::vector<std::string>& labels() const { return labels_; }
  std::string label(VertexId v) const {
    if (v >= adjacency_.size()) return "tail+" + std::to_string(v - adjacency_.size() + 1);
    return labels_.empty() ? std::to_string(v) : labels_[v];
  }

  const std::string& provider() const { return provider_; }
  /// True when the snapshot is a ball in a Cayley graph with o = identity.
  bool cayley() const { return cayley_; }

  void check_vertex(VertexId v) const {
    if (v >= adjacency_.size()) throw InputError("unknown vertex id " + std::to_string(v));
  }

  Graph with_base_ray(std::vector<VertexId> ray) const {
    return Graph(adjacency_, base_point_, core_radius_, std::move(ray), labels_, provider_, cayley_);
  }

 private:
  Adjacency adjacency_;
  VertexId base_point_;
  int core_radius_;
  std::vector<VertexId> base_ray_;
  std::vector<std::string> labels_;
  std::string provider_;
  bool cayley_;
  std::size_t edge_count_ = 0;
  std::vector<int> depth_;
  int eccentricity_ = 0;
  std::vector<VertexId> core_;
};

/// Exact graph distances from `source`.
inline std::vector<int> bfs_distances(const Graph& graph, VertexId source) {
  graph.check_vertex(source);
  const VertexId src[1] = {source};
  return bfs_from(graph.adjacency(), src);
}

/// Memoized per-source BFS rows. Safe for concurrent readers.
class DistanceOracle {
 public:
  explicit DistanceOracle(const Graph& graph) : graph_(&graph), rows_(graph.vertex_count()) {}

  DistanceOracle(const DistanceOracle&) = delete;
  DistanceOracle& operator=(const DistanceOracle&) = delete;

  const Graph& graph() const { return *graph_; }

  const std::vector<int>& from(VertexId source) const {
    graph_->check_vertex(source);
    std::lock_guard<std::mutex> lock(mutex_);
    auto& row = rows_[source];
    if (!row) row = std::make_unique<const std::vector<int>>(bfs_distances(*graph_, source));
    return *row;
  }

  int operator()(VertexId x, VertexId y) const {
    graph_->check_vertex(y);
    return from(x)[y];
  }

 private:
  const Graph* graph_;
  mutable std::mutex mutex_;
  mutable std::vector<std::unique_ptr<const std::vector<int>>> rows_;
};

/// <x,y>_w = (d(x,w) + d(y,w) - d(x,y)) / 2.
inline HalfInt gromov_product(const DistanceOracle& d, VertexId x, VertexId y, VertexId w) {
  const auto& dw = d.from(w);
  d.graph().check_vertex(x);
  d.graph().check_vertex(y);
  return HalfInt::from_twice(dw[x] + dw[y] - d(x, y));
}

struct GeodesicList {
  std::vector<std::vector<VertexId>> paths;
  bool truncated = false;
};

/// Geodesics from x to y in lexicographic order of vertex sequences; at most
/// `cap` of them, with `truncated` set when more exist.
inline GeodesicList enumerate_geodesics(const DistanceOracle& d, VertexId x, VertexId y, std::size_t cap) {
  const Graph& g = d.graph();
  g.check_vertex(x);
  const auto& to_y = d.from(y);
  GeodesicList out;
  if (to_y[x] == kUnreached) return out;

  // Iterative DFS over the geodesic DAG; frames hold the next neighbor slot.
  std::vector<VertexId> path{x};
  std::vector<std::size_t> slot{0};
  while (!path.empty()) {
    const VertexId v = path.back();
    if (v == y) {
      if (out.paths.size() == cap) {
        out.truncated = true;
        return out;
      }
      out.paths.push_back(path);
      path.pop_back();
      slot.pop_back();
      continue;
    }
    const auto nbrs = g.neighbors(v);
    std::size_t& i = slot.back();
    while (i < nbrs.size() && to_y[nbrs[i]] != to_y[v] - 1) ++i;
    if (i == nbrs.size()) {
      path.pop_back();
      slot.pop_back();
      continue;
    }
    path.push_back(nbrs[i++]);
    slot.push_back(0);
  }
  return out;
}

/// Vertices on some geodesic from x to y, ordered by distance from x.
inline std::vector<VertexId> geodesic_interval(const DistanceOracle& d, VertexId x, VertexId y) {
  const auto& dx = d.from(x);
  const auto& dy = d.from(y);
  const int dxy = dx[y];
  std::vector<VertexId> out;
  for (VertexId u = 0; u < dx.size(); ++u) {
    if (dx[u] + dy[u] == dxy) out.push_back(u);
  }
  std::stable_sort(out.begin(), out.end(), [&](VertexId a, VertexId b) { return dx[a] < dx[b]; });
  return out;
}

/// max over geodesics g from x to y of d(w, g): a bottleneck path in the
/// geodesic DAG, so no geodesic is enumerated.
inline int farthest_geodesic_distance(const DistanceOracle& d, VertexId w, VertexId x, VertexId y) {
  const auto& dx = d.from(x);
  const auto& dw = d.from(w);
  const auto order = geodesic_interval(d, x, y);
  std::vector<int> best(dx.size(), -1);
  for (VertexId v : order) {
    int reach = -1;
    if (v == x) {
      reach = dw[x];
    } else {
      for (VertexId u : d.graph().neighbors(v)) {
        if (dx[u] == dx[v] - 1 && best[u] >= 0) reach = std::max(reach, best[u]);
      }
      if (reach < 0) continue;
    }
    best[v] = std::min(reach, dw[v]);
  }
  return best[y];
}

/// d(w, g) for one explicit path g.
inline int distance_to_path(const DistanceOracle& d, VertexId w, std::span<const VertexId> path) {
  const auto& dw = d.from(w);
  int best = kUnreached;
  for (VertexId v : path) {
    if (best == kUnreached || dw[v] < best) best = dw[v];
  }
  return best;
}

inline bool is_geodesic(const DistanceOracle& d, std::span<const VertexId> path) {
  if (path.empty()) return false;
  for (std::size_t i = 0; i < path.size(); ++i) {
    const auto& row = d.from(path[i]);
    for (std::size_t j = i + 1; j < path.size(); ++j) {
      if (row[path[j]] != static_cast<int>(j - i)) return false;
    }
  }
  return true;
}

/// A geodesic ray: the snapshot part `path` followed by the virtual tail.
struct Ray {
  VertexId origin = 0;
  /// Snapshot vertices; the last one is the end of the base ray.
  std::vector<VertexId> path;
  /// path[merge_index..] is a suffix of the base ray.
  std::size_t merge_index = 0;
  /// Vertex count of the snapshot; virtual tail ids start here.
  std::size_t snapshot_vertices = 0;

  std::size_t snapshot_length() const { return path.size() - 1; }

  VertexId at(std::size_t i) const {
    if (i < path.size()) return path[i];
    return static_cast<VertexId>(snapshot_vertices + (i - path.size()));
  }
};

inline bool is_virtual(VertexId v, std::size_t snapshot_vertices) { return v >= snapshot_vertices; }

/// 1-based position of a virtual vertex along the tail.
inline int tail_step(VertexId v, std::size_t snapshot_vertices) {
  return static_cast<int>(v - snapshot_vertices) + 1;
}

inline Ray build_base_ray(const Graph& graph) {
  if (!graph.has_base_ray()) throw GraphError("graph has no designated base ray");
  Ray r;
  r.origin = graph.base_ray().front();
  r.path.assign(graph.base_ray().begin(), graph.base_ray().end());
  r.merge_index = 0;
  r.snapshot_vertices = graph.vertex_count();
  return r;
}

/// p_x: a geodesic from x that merges into the base ray at the earliest
/// possible position along it; the prefix up to the merge point is the
/// lexicographically smallest geodesic.
inline Ray build_ray(const DistanceOracle& d, const Ray& base, VertexId x) {
  const Graph& g = d.graph();
  g.check_vertex(x);
  const auto& dx = d.from(x);
  const std::size_t last = base.path.size() - 1;
  const int to_end = dx[base.path[last]];

  std::size_t merge = last;
  for (std::size_t j = 0; j <= last; ++j) {
    if (dx[base.path[j]] + static_cast<int>(last - j) == to_end) {
      merge = j;
      break;
    }
  }

  const VertexId target = base.path[merge];
  const auto& dt = d.from(target);
  Ray r;
  r.origin = x;
  r.snapshot_vertices = g.vertex_count();
  r.path.push_back(x);
  VertexId v = x;
  while (v != target) {
    const auto nbrs = g.neighbors(v);
    auto it = std::find_if(nbrs.begin(), nbrs.end(), [&](VertexId u) { return dt[u] == dt[v] - 1; });
    if (it == nbrs.end()) throw GraphError("no geodesic from vertex " + g.label(x) + " into the base ray");
    v = *it;
    r.path.push_back(v);
  }
  r.merge_index = r.path.size() - 1;
  for (std::size_t j = merge + 1; j <= last; ++j) r.path.push_back(base.path[j]);

  for (std::size_t i = 0; i < r.path.size(); ++i) {
    if (dx[r.path[i]] != static_cast<int>(i)) {
      throw GraphError("ray from vertex " + g.label(x) + " is not geodesic at index " + std::to_string(i));
    }
  }
  return r;
}

/// Distance in the snapshot extended by the virtual tail of `base`.
inline int distance_with_tail(const DistanceOracle& d, const Ray& base, VertexId u, VertexId v) {
  const std::size_t n = base.snapshot_vertices;
  const bool vu = is_virtual(u, n);
  const bool vv = is_virtual(v, n);
  if (vu && vv) return std::abs(tail_step(u, n) - tail_step(v, n));
  if (!vu && !vv) return d(u, v);
  if (vu) std::swap(u, v);
  return d(u, base.path.back()) + tail_step(v, n);
}

}  // namespace hypwa
