#pragma once

// Corridor sets T(x,k), the pair relations W(k,l) and Z(k,l), and the
// covering / partition checks over the core.
//
// Rays are infinite: past the last snapshot vertex of the base ray every
// p_x continues along the virtual tail (see graph.hpp), so T(x,k) is defined
// for every k and tail points belong to every corridor.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "hypwa/error.hpp"
#include "hypwa/graph.hpp"

namespace hypwa {

enum class ParamMode { paper, empirical, manual };

inline std::string to_string(ParamMode m) {
  switch (m) {
    case ParamMode::paper: return "paper";
    case ParamMode::empirical: return "empirical";
    default: return "manual";
  }
}

struct CorridorParams {
  double rho = 0.5;  // corridor width, strict: d(w, p_x) < rho
  int R0 = 1;
  int R1 = 1;
  ParamMode mode = ParamMode::manual;
  HalfInt delta{1};

  void validate() const {
    if (!(rho > 0.0)) throw InputError("corridor width must be positive");
    if (R0 < 0 || R1 < 0) throw InputError("R0 and R1 must be non-negative");
  }
};

/// rho = 100 delta, R0 = 200 delta + 1, R1 = 2 R0.
inline CorridorParams paper_params(HalfInt delta) {
  CorridorParams p;
  p.delta = delta;
  p.rho = 100.0 * delta.to_double();
  p.R0 = static_cast<int>(100 * delta.twice()) + 1;
  p.R1 = 2 * p.R0;
  p.mode = ParamMode::paper;
  return p;
}

/// The rho-independent part: one ray per core vertex, its distance row and
/// the distance of every snapshot vertex to the ray.
class RayTable {
 public:
  explicit RayTable(Graph graph)
      : graph_(std::make_unique<const Graph>(std::move(graph))),
        oracle_(std::make_unique<DistanceOracle>(*graph_)),
        base_(build_base_ray(*graph_)) {
    const auto core = graph_->core();
    core_index_.assign(graph_->vertex_count(), -1);
    rays_.reserve(core.size());
    ray_dist_.reserve(core.size());
    for (std::size_t i = 0; i < core.size(); ++i) {
      const VertexId x = core[i];
      core_index_[x] = static_cast<int>(i);
      rays_.push_back(build_ray(*oracle_, base_, x));
      ray_dist_.push_back(bfs_from(graph_->adjacency(), std::span<const VertexId>(rays_.back().path)));
      const auto& dx = oracle_->from(x);
      max_level_.push_back(*std::max_element(dx.begin(), dx.end()));
      ecc_max_ = std::max(ecc_max_, max_level_.back());
    }
  }

  const Graph& graph() const { return *graph_; }
  const DistanceOracle& oracle() const { return *oracle_; }
  const Ray& base() const { return base_; }

  std::span<const VertexId> core() const { return graph_->core(); }
  std::size_t core_size() const { return rays_.size(); }

  /// Position of v in core(), or -1.
  int core_index(VertexId v) const { return v < core_index_.size() ? core_index_[v] : -1; }

  std::size_t index_of(VertexId v) const {
    const int i = core_index(v);
    if (i < 0) throw InputError("vertex " + graph_->label(v) + " is outside the core");
    return static_cast<std::size_t>(i);
  }

  const Ray& ray(std::size_t i) const { return rays_[i]; }
  const std::vector<int>& dist(std::size_t i) const { return oracle_->from(rays_[i].origin); }
  const std::vector<int>& ray_distance(std::size_t i) const { return ray_dist_[i]; }

  /// d(x, end of the base snapshot ray).
  int end_distance(std::size_t i) const { return static_cast<int>(rays_[i].path.size()) - 1; }
  int max_level(std::size_t i) const { return max_level_[i]; }
  int eccentricity_max() const { return ecc_max_; }

  /// Beyond this n only tail points enter W, and the pattern repeats.
  int horizon() const { return 2 * ecc_max_ + 3; }

  std::size_t snapshot_vertices() const { return graph_->vertex_count(); }

  int distance(VertexId u, VertexId v) const { return distance_with_tail(*oracle_, base_, u, v); }

  VertexId tail_vertex(int t) const { return static_cast<VertexId>(snapshot_vertices() + t - 1); }

 private:
  std::unique_ptr<const Graph> graph_;
  std::unique_ptr<DistanceOracle> oracle_;
  Ray base_;
  std::vector<int> core_index_;
  std::vector<Ray> rays_;
  std::vector<std::vector<int>> ray_dist_;
  std::vector<int> max_level_;
  int ecc_max_ = 0;
};

/// T(x,k) for every core x with fixed parameters. Core vertices are addressed
/// by their index in RayTable::core().
class CorridorModel {
 public:
  CorridorModel(std::shared_ptr<const RayTable> table, CorridorParams params)
      : table_(std::move(table)), params_(params) {
    params_.validate();
    const std::size_t n = table_->core_size();
    buckets_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& dx = table_->dist(i);
      const auto& dr = table_->ray_distance(i);
      auto& b = buckets_[i];
      b.resize(table_->max_level(i) + 1);
      for (VertexId w = 0; w < dx.size(); ++w) {
        if (dr[w] < params_.rho) b[dx[w]].push_back(w);
      }
    }
  }

  const RayTable& table() const { return *table_; }
  std::shared_ptr<const RayTable> table_ptr() const { return table_; }
  const CorridorParams& params() const { return params_; }
  std::size_t core_size() const { return table_->core_size(); }

  bool in_corridor(std::size_t i, VertexId w) const {
    if (is_virtual(w, table_->snapshot_vertices())) return true;
    return table_->ray_distance(i)[w] < params_.rho;
  }

  /// d(x, w) including tail points.
  int level_of(std::size_t i, VertexId w) const {
    const std::size_t n = table_->snapshot_vertices();
    if (is_virtual(w, n)) return table_->end_distance(i) + tail_step(w, n);
    return table_->dist(i)[w];
  }

  bool contains(std::size_t i, int k, VertexId w) const {
    if (k < 0 || !in_corridor(i, w)) return false;
    const int d = level_of(i, w);
    return d == k || d == k - 1;
  }

  /// Calls f(w) for w in T(x,k) in increasing id order.
  template <class F>
  void for_each_member(std::size_t i, int k, F&& f) const {
    if (k < 0) return;
    const auto& b = buckets_[i];
    const std::vector<VertexId> none;
    const auto& lo = k - 1 >= 0 && k - 1 < static_cast<int>(b.size()) ? b[k - 1] : none;
    const auto& hi = k < static_cast<int>(b.size()) ? b[k] : none;
    auto p = lo.begin(), q = hi.begin();
    while (p != lo.end() || q != hi.end()) {
      if (q == hi.end() || (p != lo.end() && *p < *q)) f(*p++);
      else f(*q++);
    }
    const int dx = table_->end_distance(i);
    for (int t = std::max(1, k - 1 - dx); t <= k - dx; ++t) f(table_->tail_vertex(t));
  }

  std::vector<VertexId> members(std::size_t i, int k) const {
    std::vector<VertexId> out;
    for_each_member(i, k, [&](VertexId w) { out.push_back(w); });
    return out;
  }

  std::size_t size(std::size_t i, int k) const {
    std::size_t s = 0;
    for_each_member(i, k, [&](VertexId) { ++s; });
    return s;
  }

  std::size_t intersection_size(std::size_t i, int k, std::size_t j, int l) const {
    std::size_t s = 0;
    for_each_member(i, k, [&](VertexId w) { s += contains(j, l, w); });
    return s;
  }

  bool intersects(std::size_t i, int k, std::size_t j, int l) const {
    if (k < 0 || l < 0) return false;
    bool hit = false;
    for_each_member(i, k, [&](VertexId w) { hit = hit || contains(j, l, w); });
    return hit;
  }

  bool in_W(std::size_t i, std::size_t j, int k, int l) const { return intersects(i, k, j, l); }

  bool in_Z(std::size_t i, std::size_t j, int k, int l) const {
    if (!in_W(i, j, k, l)) return false;
    for (int s = 1; s <= params_.R1 && l - s >= 0; ++s) {
      if (in_W(i, j, k + s, l - s)) return false;
    }
    return true;
  }

  /// levels[n] = sorted k with (x,y) in W(k, n-k), for n = 0..n_max.
  std::vector<std::vector<int>> w_levels(std::size_t i, std::size_t j, int n_max) const {
    std::vector<std::vector<int>> levels(std::max(0, n_max + 1));
    auto mark = [&](int a, int b) {
      // w at distances a from x and b from y lies in T(x,k), T(y,l) for
      // k in {a, a+1}, l in {b, b+1}
      const int n = a + b;
      if (n <= n_max) levels[n].push_back(a);
      if (n + 1 <= n_max) {
        levels[n + 1].push_back(a);
        levels[n + 1].push_back(a + 1);
      }
      if (n + 2 <= n_max) levels[n + 2].push_back(a + 1);
    };
    const auto& dy = table_->dist(j);
    const auto& ry = table_->ray_distance(j);
    const auto& b = buckets_[i];
    for (int a = 0; a < static_cast<int>(b.size()) && a <= n_max; ++a) {
      for (VertexId w : b[a]) {
        if (ry[w] < params_.rho) mark(a, dy[w]);
      }
    }
    const int dx = table_->end_distance(i), dyend = table_->end_distance(j);
    for (int t = 1; dx + dyend + 2 * t <= n_max; ++t) mark(dx + t, dyend + t);
    for (auto& v : levels) {
      std::sort(v.begin(), v.end());
      v.erase(std::unique(v.begin(), v.end()), v.end());
    }
    return levels;
  }

  /// C1 = max |T(w,m)| over core w and all m.
  std::size_t max_corridor_size() const {
    std::size_t c1 = 0;
    for (std::size_t i = 0; i < core_size(); ++i) {
      for (int k = 0; k <= table_->max_level(i) + 2; ++k) c1 = std::max(c1, size(i, k));
    }
    return c1;
  }

 private:
  std::shared_ptr<const RayTable> table_;
  CorridorParams params_;
  std::vector<std::vector<std::vector<VertexId>>> buckets_;
};

struct CorridorSet {
  VertexId owner = 0;
  int level = 0;
  std::vector<VertexId> members;
  VertexId center = 0;         // p_x(k)
  int enclosing_radius = 0;    // max d(center, w) over members
  bool within_R0 = true;       // members inside the open ball B_R0(center)
};

inline CorridorSet corridor_set(const CorridorModel& m, VertexId x, int k) {
  const std::size_t i = m.table().index_of(x);
  CorridorSet s;
  s.owner = x;
  s.level = k;
  if (k < 0) return s;
  s.members = m.members(i, k);
  s.center = m.table().ray(i).at(static_cast<std::size_t>(k));
  for (VertexId w : s.members) s.enclosing_radius = std::max(s.enclosing_radius, m.table().distance(s.center, w));
  s.within_R0 = s.enclosing_radius < m.params().R0;
  return s;
}

enum class RelationKind { W, Z };

/// Boolean matrix over core x core, row-major by core index.
struct PairRelation {
  RelationKind kind = RelationKind::W;
  int k = 0, l = 0;
  std::size_t dim = 0;
  std::vector<std::uint8_t> bits;

  bool at(std::size_t i, std::size_t j) const { return bits[i * dim + j] != 0; }
  std::size_t count() const { return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), 1)); }
};

inline PairRelation relation_W(const CorridorModel& m, int k, int l) {
  PairRelation r{RelationKind::W, k, l, m.core_size(), {}};
  r.bits.assign(r.dim * r.dim, 0);
  for (std::size_t i = 0; i < r.dim; ++i)
    for (std::size_t j = 0; j < r.dim; ++j) r.bits[i * r.dim + j] = m.in_W(i, j, k, l);
  return r;
}

inline PairRelation relation_Z(const CorridorModel& m, int k, int l) {
  PairRelation r{RelationKind::Z, k, l, m.core_size(), {}};
  r.bits.assign(r.dim * r.dim, 0);
  for (std::size_t i = 0; i < r.dim; ++i)
    for (std::size_t j = 0; j < r.dim; ++j) r.bits[i * r.dim + j] = m.in_Z(i, j, k, l);
  return r;
}

/// One row per core vertex, '0'/'1' characters.
inline void write_bit_matrix(std::ostream& os, const PairRelation& r) {
  for (std::size_t i = 0; i < r.dim; ++i) {
    for (std::size_t j = 0; j < r.dim; ++j) os << (r.at(i, j) ? '1' : '0');
    os << '\n';
  }
}

struct R1Report {
  int R1 = 0;
  int n_max = 0;
  bool bound_checked = false;  // paper mode: compared against 2 R0
  bool within_bound = true;
  VertexId witness_x = 0, witness_y = 0;
  int witness_n = 0;
};

/// Smallest R with no core pair in W(k,l) and W(k+j,l-j) for some j > R,
/// over k + l <= n_max.
inline R1Report empirical_R1(const CorridorModel& m, int n_max) {
  R1Report r;
  r.n_max = n_max;
  const auto core = m.table().core();
  for (std::size_t i = 0; i < m.core_size(); ++i)
    for (std::size_t j = 0; j < m.core_size(); ++j) {
      const auto levels = m.w_levels(i, j, n_max);
      for (int n = 0; n <= n_max; ++n) {
        const auto& v = levels[n];
        if (v.size() < 2) continue;
        const int spread = v.back() - v.front();
        if (spread > r.R1) {
          r.R1 = spread;
          r.witness_x = core[i];
          r.witness_y = core[j];
          r.witness_n = n;
        }
      }
    }
  if (m.params().mode == ParamMode::paper) {
    r.bound_checked = true;
    r.within_bound = r.R1 <= 2 * m.params().R0;
  }
  return r;
}

struct PairViolation {
  VertexId x = 0, y = 0;
  int n = 0;
  int distance = 0;
  int z_count = 0;               // partition: number of k with (x,y) in Z(k,n-k)
  std::vector<int> w_row;        // k with (x,y) in W(k,n-k)
};

struct IdentityReport {
  bool passed = true;
  int n_max = 0;
  std::uint64_t pairs_checked = 0;
  std::uint64_t cases_checked = 0;  // pairs x levels
  std::uint64_t violation_count = 0;
  std::vector<PairViolation> violations;  // first few only
};

namespace detail {

inline void record(IdentityReport& r, PairViolation v, std::size_t keep) {
  r.passed = false;
  ++r.violation_count;
  if (r.violations.size() < keep) r.violations.push_back(std::move(v));
}

// Z picks the k in W_n with no other W-level in (k, k+R1].
inline int z_count(const std::vector<int>& w, int R1) {
  int count = 0;
  for (std::size_t a = 0; a < w.size(); ++a) {
    if (a + 1 == w.size() || w[a + 1] - w[a] > R1) ++count;
  }
  return count;
}

}  // namespace detail

/// sum_k chi_Z(k,n-k)(x,y) == [d(x,y) <= n] for all core pairs, n <= n_max.
inline IdentityReport verify_partition(const CorridorModel& m, int n_max, std::size_t keep = 16) {
  IdentityReport r;
  r.n_max = n_max;
  const auto core = m.table().core();
  for (std::size_t i = 0; i < m.core_size(); ++i) {
    const auto& dx = m.table().dist(i);
    for (std::size_t j = 0; j < m.core_size(); ++j) {
      ++r.pairs_checked;
      const auto levels = m.w_levels(i, j, n_max);
      const int d = dx[core[j]];
      for (int n = 0; n <= n_max; ++n) {
        ++r.cases_checked;
        const int zc = detail::z_count(levels[n], m.params().R1);
        if (zc != (d <= n ? 1 : 0)) detail::record(r, {core[i], core[j], n, d, zc, levels[n]}, keep);
      }
    }
  }
  return r;
}

/// E(n) == union_k W(k, n-k) on core pairs, n <= n_max.
inline IdentityReport covering_check(const CorridorModel& m, int n_max, std::size_t keep = 16) {
  IdentityReport r;
  r.n_max = n_max;
  const auto core = m.table().core();
  for (std::size_t i = 0; i < m.core_size(); ++i) {
    const auto& dx = m.table().dist(i);
    for (std::size_t j = 0; j < m.core_size(); ++j) {
      ++r.pairs_checked;
      const auto levels = m.w_levels(i, j, n_max);
      const int d = dx[core[j]];
      for (int n = 0; n <= n_max; ++n) {
        ++r.cases_checked;
        const bool covered = !levels[n].empty();
        if (covered != (d <= n)) detail::record(r, {core[i], core[j], n, d, -1, levels[n]}, keep);
      }
    }
  }
  return r;
}

/// Candidate widths 0.5, 1.5, ..., diam + 0.5.
inline std::vector<double> rho_grid(const RayTable& t) {
  std::vector<double> g;
  for (int k = 0; k <= t.eccentricity_max(); ++k) g.push_back(k + 0.5);
  return g;
}

/// Smallest grid width for which covering holds up to n_max. Covering is
/// monotone in rho, so the grid is bisected.
inline double minimal_rho(std::shared_ptr<const RayTable> t, int n_max, const std::vector<double>& grid) {
  if (grid.empty()) throw InputError("empty rho grid");
  auto passes = [&](double rho) {
    CorridorParams p;
    p.rho = rho;
    p.R1 = 0;
    return covering_check(CorridorModel(t, p), n_max, 0).passed;
  };
  std::size_t lo = 0, hi = grid.size() - 1;
  if (!passes(grid[hi])) throw GraphError("covering fails even at the widest corridor");
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (passes(grid[mid])) hi = mid;
    else lo = mid + 1;
  }
  return grid[lo];
}

/// Largest enclosing radius of T(x,k) around p_x(k), over core x and every
/// level carrying snapshot members.
inline int max_enclosing_radius(const CorridorModel& m) {
  int worst = 0;
  const auto core = m.table().core();
  for (std::size_t i = 0; i < m.core_size(); ++i) {
    for (int k = 0; k <= m.table().max_level(i) + 2; ++k) worst = std::max(worst, corridor_set(m, core[i], k).enclosing_radius);
  }
  return worst;
}

/// Empirical mode: minimal covering width, R0 = enclosing radius + 1, and R1
/// measured up to the horizon past which the W pattern is periodic.
inline CorridorParams calibrate_empirical(std::shared_ptr<const RayTable> t, HalfInt delta,
                                          std::optional<double> rho_override = std::nullopt) {
  CorridorParams p;
  p.delta = delta;
  p.mode = ParamMode::empirical;
  p.rho = rho_override ? *rho_override : minimal_rho(t, t->horizon(), rho_grid(*t));
  p.R1 = 0;
  CorridorModel probe(t, p);
  p.R0 = max_enclosing_radius(probe) + 1;
  p.R1 = empirical_R1(probe, t->horizon()).R1;
  return p;
}

}  // namespace hypwa
