#pragma once

// Graph snapshot providers: edge-list files and generators for free-group
// balls, regular trees, lines and cycles. Every provider designates a base
// ray.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hypwa/graph.hpp"

namespace hypwa {

inline constexpr std::uint64_t kDefaultVertexCap = 2'000'000;

enum class ProviderKind { edge_list_file, free_group, regular_tree, line, cycle };

struct ProviderSpec {
  ProviderKind kind = ProviderKind::line;
  std::string path;                 // edge_list_file
  int rank = 0;                     // free_group
  int branching = 0;                // regular_tree (vertex degree)
  int size = 0;                     // radius / depth / line length / cycle length
  std::vector<VertexId> base_ray_hint;
  std::optional<VertexId> base_point;
  std::uint64_t vertex_cap = kDefaultVertexCap;
};

struct LoadResult {
  Graph graph;
  std::vector<std::string> warnings;
};

namespace detail {

inline void check_cap(std::uint64_t count, std::uint64_t cap) {
  if (count > cap) {
    throw InputError("generated graph would have " + std::to_string(count) + " vertices, above the cap of " +
                     std::to_string(cap));
  }
}

inline void add_edge(Graph::Adjacency& adj, VertexId a, VertexId b) {
  adj[a].push_back(b);
  adj[b].push_back(a);
}

// Lexicographically smallest geodesic from `from` to `to`.
inline std::vector<VertexId> smallest_geodesic(const Graph::Adjacency& adj, VertexId from, VertexId to) {
  const VertexId src[1] = {to};
  const auto dt = bfs_from(adj, src);
  std::vector<VertexId> path{from};
  VertexId v = from;
  while (v != to) {
    std::vector<VertexId> nbrs = adj[v];
    std::sort(nbrs.begin(), nbrs.end());
    for (VertexId u : nbrs) {
      if (dt[u] == dt[v] - 1) {
        v = u;
        break;
      }
    }
    path.push_back(v);
  }
  return path;
}

}  // namespace detail

/// Number of reduced words of length <= radius over `rank` generators.
inline std::uint64_t free_group_ball_size(int rank, int radius) {
  std::uint64_t total = 1;
  std::uint64_t sphere = 2ULL * static_cast<std::uint64_t>(rank);
  for (int k = 1; k <= radius; ++k) {
    total += sphere;
    if (total > (1ULL << 62)) return total;
    sphere *= 2ULL * static_cast<std::uint64_t>(rank) - 1ULL;
  }
  return total;
}

/// Ball of radius `radius` in the Cayley graph of the free group of the
/// given rank. Generators are a, b, c, ... with inverses A, B, C, ...; ids
/// follow shortlex order with generator order a < A < b < B < ...; the base
/// ray is e, a, a^2, ..., a^radius.
inline Graph gen_free_group_ball(int rank, int radius, std::uint64_t vertex_cap = kDefaultVertexCap) {
  if (rank < 1 || rank > 26) throw InputError("free group rank must be in [1, 26]");
  if (radius < 1) throw InputError("free group radius must be >= 1");
  detail::check_cap(free_group_ball_size(rank, radius), vertex_cap);

  std::vector<char> letters;
  for (int i = 0; i < rank; ++i) {
    letters.push_back(static_cast<char>('a' + i));
    letters.push_back(static_cast<char>('A' + i));
  }
  auto inverse = [](char c) -> char { return std::islower(static_cast<unsigned char>(c)) ? static_cast<char>(std::toupper(c)) : static_cast<char>(std::tolower(c)); };

  std::vector<std::string> words{""};
  std::unordered_map<std::string, VertexId> id{{"", 0}};
  Graph::Adjacency adj(1);
  for (std::size_t head = 0; head < words.size(); ++head) {
    const std::string w = words[head];
    if (static_cast<int>(w.size()) == radius) continue;
    for (char g : letters) {
      if (!w.empty() && w.back() == inverse(g)) continue;
      std::string next = w + g;
      const auto nid = static_cast<VertexId>(words.size());
      id.emplace(next, nid);
      words.push_back(std::move(next));
      adj.emplace_back();
      detail::add_edge(adj, static_cast<VertexId>(head), nid);
    }
  }

  std::vector<std::string> labels;
  labels.reserve(words.size());
  for (const auto& w : words) labels.push_back(w.empty() ? "e" : w);

  std::vector<VertexId> ray;
  std::string power;
  for (int k = 0; k <= radius; ++k) {
    ray.push_back(id.at(power));
    power += 'a';
  }
  return Graph(std::move(adj), 0, radius, std::move(ray), std::move(labels),
               "free_group(" + std::to_string(rank) + "," + std::to_string(radius) + ")", true);
}

/// Ball of radius `depth` in the tree where every vertex has degree
/// `branching`. The root is vertex 0; the base ray follows first children.
inline Graph gen_regular_tree(int branching, int depth, std::uint64_t vertex_cap = kDefaultVertexCap) {
  if (branching < 1) throw InputError("tree branching must be >= 1");
  if (depth < 1) throw InputError("tree depth must be >= 1");
  std::uint64_t count = 1, level = static_cast<std::uint64_t>(branching);
  for (int k = 1; k <= depth; ++k) {
    count += level;
    detail::check_cap(count, vertex_cap);
    level *= static_cast<std::uint64_t>(branching - 1);
  }

  Graph::Adjacency adj(1);
  std::vector<int> depth_of{0};
  int reached = 0;
  std::vector<VertexId> ray{0};
  for (std::size_t head = 0; head < adj.size(); ++head) {
    if (depth_of[head] == depth) continue;
    const int children = head == 0 ? branching : branching - 1;
    for (int c = 0; c < children; ++c) {
      const auto nid = static_cast<VertexId>(adj.size());
      adj.emplace_back();
      depth_of.push_back(depth_of[head] + 1);
      reached = std::max(reached, depth_of.back());
      detail::add_edge(adj, static_cast<VertexId>(head), nid);
      if (c == 0 && ray.back() == head) ray.push_back(nid);
    }
  }
  // Degree 1 stops after one edge.
  return Graph(std::move(adj), 0, std::min(depth, reached), std::move(ray), {},
               "regular_tree(" + std::to_string(branching) + "," + std::to_string(depth) + ")", true);
}

/// Path on vertices 0..n with base point at the center floor(n/2); the base
/// ray runs from the center to n.
inline Graph gen_line(int n, std::uint64_t vertex_cap = kDefaultVertexCap) {
  if (n < 1) throw InputError("line length must be >= 1");
  detail::check_cap(static_cast<std::uint64_t>(n) + 1, vertex_cap);
  Graph::Adjacency adj(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i < n; ++i) detail::add_edge(adj, static_cast<VertexId>(i), static_cast<VertexId>(i + 1));
  const auto center = static_cast<VertexId>(n / 2);
  std::vector<VertexId> ray;
  for (int i = n / 2; i <= n; ++i) ray.push_back(static_cast<VertexId>(i));
  return Graph(std::move(adj), center, n / 2, std::move(ray), {}, "line(" + std::to_string(n) + ")", true);
}

/// Cycle on n >= 3 vertices, base point 0, base ray the arc 0..floor(n/2).
inline Graph gen_cycle(int n, std::uint64_t vertex_cap = kDefaultVertexCap) {
  if (n < 3) throw InputError("cycle length must be >= 3");
  detail::check_cap(static_cast<std::uint64_t>(n), vertex_cap);
  Graph::Adjacency adj(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) detail::add_edge(adj, static_cast<VertexId>(i), static_cast<VertexId>((i + 1) % n));
  std::vector<VertexId> ray;
  for (int i = 0; i <= n / 2; ++i) ray.push_back(static_cast<VertexId>(i));
  return Graph(std::move(adj), 0, n / 2, std::move(ray), {}, "cycle(" + std::to_string(n) + ")", true);
}

/// Parses the edge-list format from a stream. Lines: "u v" edges, "#"
/// comments, optional "base <id>" and "ray <id> <id> ...". Vertex ids in the
/// result are the file ids in increasing order, restricted to the component
/// of the base point; labels keep the file ids.
inline LoadResult parse_edge_list(std::istream& in, std::optional<VertexId> base_override = std::nullopt,
                                  std::vector<VertexId> ray_override = {}) {
  std::vector<std::pair<std::uint64_t, std::uint64_t>> edges;
  std::optional<std::uint64_t> base;
  std::vector<std::uint64_t> ray;
  std::vector<std::string> warnings;

  auto parse_id = [](const std::string& tok, std::size_t line_no) -> std::uint64_t {
    if (tok.empty() || !std::all_of(tok.begin(), tok.end(), [](unsigned char c) { return std::isdigit(c); })) {
      throw InputError("line " + std::to_string(line_no) + ": expected a non-negative integer, got '" + tok + "'");
    }
    try {
      return std::stoull(tok);
    } catch (const std::exception&) {
      throw InputError("line " + std::to_string(line_no) + ": vertex id out of range '" + tok + "'");
    }
  };

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ss(line);
    std::vector<std::string> tokens;
    for (std::string tok; ss >> tok;) tokens.push_back(tok);
    if (tokens[0] == "base") {
      if (tokens.size() != 2) throw InputError("line " + std::to_string(line_no) + ": 'base' takes one vertex id");
      base = parse_id(tokens[1], line_no);
    } else if (tokens[0] == "ray") {
      if (tokens.size() < 2) throw InputError("line " + std::to_string(line_no) + ": 'ray' needs at least one vertex id");
      ray.clear();
      for (std::size_t i = 1; i < tokens.size(); ++i) ray.push_back(parse_id(tokens[i], line_no));
    } else {
      if (tokens.size() != 2) throw InputError("line " + std::to_string(line_no) + ": expected two vertex ids");
      edges.emplace_back(parse_id(tokens[0], line_no), parse_id(tokens[1], line_no));
    }
  }
  if (edges.empty()) throw InputError("edge list contains no edges");

  // Directed-looking input: some edges listed both ways, some only one way.
  std::set<std::pair<std::uint64_t, std::uint64_t>> declared;
  std::size_t loops = 0;
  for (auto [a, b] : edges) {
    if (a == b) {
      ++loops;
      continue;
    }
    declared.emplace(a, b);
  }
  if (loops > 0) warnings.push_back("dropped " + std::to_string(loops) + " self-loop line(s)");
  std::size_t both = 0, one = 0;
  for (auto [a, b] : declared) {
    if (declared.count({b, a})) ++both;
    else ++one;
  }
  if (both > 0 && one > 0) {
    warnings.push_back("asymmetric edge declarations: " + std::to_string(one) + " edge(s) listed in one direction only; symmetrized");
  }

  std::set<std::uint64_t> ids;
  for (auto [a, b] : edges) {
    ids.insert(a);
    ids.insert(b);
  }
  std::map<std::uint64_t, VertexId> compact;
  for (auto v : ids) compact.emplace(v, static_cast<VertexId>(compact.size()));

  Graph::Adjacency full(compact.size());
  for (auto [a, b] : declared) detail::add_edge(full, compact.at(a), compact.at(b));
  for (auto& nbrs : full) {
    std::sort(nbrs.begin(), nbrs.end());
    nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
  }

  std::uint64_t base_id = base_override ? *base_override : (base ? *base : *ids.begin());
  if (!compact.count(base_id)) throw InputError("base point " + std::to_string(base_id) + " does not appear in any edge");
  const VertexId src[1] = {compact.at(base_id)};
  const auto reach = bfs_from(full, src);

  // Restrict to the component of the base point, keeping id order.
  std::vector<std::uint64_t> file_id(compact.size());
  for (auto [fid, cid] : compact) file_id[cid] = fid;
  std::vector<VertexId> remap(compact.size(), static_cast<VertexId>(-1));
  std::vector<std::string> labels;
  for (VertexId v = 0; v < full.size(); ++v) {
    if (reach[v] != kUnreached) {
      remap[v] = static_cast<VertexId>(labels.size());
      labels.push_back(std::to_string(file_id[v]));
    }
  }
  if (labels.size() < compact.size()) {
    warnings.push_back("kept the component of the base point: " + std::to_string(compact.size() - labels.size()) +
                       " vertex(es) dropped");
  }
  Graph::Adjacency adj(labels.size());
  for (VertexId v = 0; v < full.size(); ++v) {
    if (remap[v] == static_cast<VertexId>(-1)) continue;
    for (VertexId u : full[v]) adj[remap[v]].push_back(remap[u]);
  }
  const VertexId o = remap[compact.at(base_id)];
  const auto depth = bfs_from(adj, std::span<const VertexId>(&o, 1));
  const int ecc = *std::max_element(depth.begin(), depth.end());

  std::vector<VertexId> base_ray;
  if (!ray_override.empty()) ray.assign(ray_override.begin(), ray_override.end());
  if (!ray.empty()) {
    for (auto fid : ray) {
      if (!compact.count(fid) || remap[compact.at(fid)] == static_cast<VertexId>(-1)) {
        throw InputError("ray vertex " + std::to_string(fid) + " is not in the component of the base point");
      }
      base_ray.push_back(remap[compact.at(fid)]);
    }
  } else {
    VertexId far = o;
    for (VertexId v = 0; v < adj.size(); ++v) {
      if (depth[v] > depth[far]) far = v;
    }
    base_ray = detail::smallest_geodesic(adj, o, far);
  }
  return {Graph(std::move(adj), o, ecc, std::move(base_ray), std::move(labels), "edge_list", false), std::move(warnings)};
}

inline LoadResult load_edge_list(const std::string& path, std::optional<VertexId> base_override = std::nullopt,
                                 std::vector<VertexId> ray_override = {}) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open edge list '" + path + "'");
  return parse_edge_list(in, base_override, std::move(ray_override));
}

inline LoadResult make_graph(const ProviderSpec& spec) {
  switch (spec.kind) {
    case ProviderKind::edge_list_file:
      return load_edge_list(spec.path, spec.base_point, spec.base_ray_hint);
    case ProviderKind::free_group:
      return {gen_free_group_ball(spec.rank, spec.size, spec.vertex_cap), {}};
    case ProviderKind::regular_tree:
      return {gen_regular_tree(spec.branching, spec.size, spec.vertex_cap), {}};
    case ProviderKind::line:
      return {gen_line(spec.size, spec.vertex_cap), {}};
    case ProviderKind::cycle:
      return {gen_cycle(spec.size, spec.vertex_cap), {}};
  }
  throw InputError("unknown provider kind");
}

}  // namespace hypwa
