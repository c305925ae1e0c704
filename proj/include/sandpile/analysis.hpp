#pragma once

#include <algorithm>
#include <cstdint>
#include <ostream>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sandpile/configuration.hpp"
#include "sandpile/errors.hpp"
#include "sandpile/intmath.hpp"
#include "sandpile/model.hpp"

namespace sandpile {

/// n = excess + staircase*(staircase+1)/2 with 0 <= excess <= staircase.
/// That range is the one under which the decomposition is unique.
struct TriangularDecomposition {
  std::int64_t staircase = 0;
  std::int64_t excess = 0;

  friend bool operator==(const TriangularDecomposition&, const TriangularDecomposition&) = default;
};

inline TriangularDecomposition triangular_decomposition(std::int64_t n) {
  if (n < 0) throw std::invalid_argument("triangular_decomposition: negative grain count");
  // Largest p with p(p+1)/2 <= n; the isqrt estimate is corrected locally so
  // boundary values at exact triangular numbers cannot be off by one.
  std::int64_t p = (isqrt(8 * n + 1) - 1) / 2;
  while (triangular(p) > n) --p;
  while (triangular(p + 1) <= n) ++p;
  return TriangularDecomposition{p, n - triangular(p)};
}

/// Length of the fixed point grown from a single pile of n grains: the
/// smallest l with l(l+1)/2 >= n. Exact integer arithmetic throughout.
inline std::int64_t single_pile_fixpoint_length(std::int64_t n) {
  if (n < 0) throw std::invalid_argument("single_pile_fixpoint_length: negative grain count");
  const auto [p, k] = triangular_decomposition(n);
  return k == 0 ? p : p + 1;
}

/// The staircase a single pile of n grains settles into:
/// (p, p-1, ..., 1) when the excess k is zero, otherwise
/// (p, p-1, ..., k+1, k, k, k-1, ..., 1) with the excess step doubled.
inline Configuration single_pile_fixpoint(std::int64_t n) {
  const auto [p, k] = triangular_decomposition(n);
  std::vector<Height> h;
  h.reserve(static_cast<std::size_t>(k == 0 ? p : p + 1));
  for (std::int64_t v = p; v >= k + 1; --v) h.push_back(v);
  if (k > 0) {
    h.push_back(k);
    for (std::int64_t v = k; v >= 1; --v) h.push_back(v);
  }
  return Configuration(std::move(h));
}

/// Sequential steps from (n) to its fixed point:
/// (p+1)p(p-1)/6 + k(2p+1-k)/2.
inline std::int64_t single_pile_transient_seq(std::int64_t n) {
  const auto [p, k] = triangular_decomposition(n);
  return (p + 1) * p * (p - 1) / 6 + k * (2 * p + 1 - k) / 2;
}

/// True iff c occurs in the orbit of the single pile with the same grain
/// count (SPM): non-increasing, and no two plateaus without a cliff between
/// them. Three equal columns count as two adjacent plateaus. Single scan.
inline bool is_reachable(const Configuration& c) {
  int plateau_pairs = 0;
  for (std::int64_t i = 0; i + 1 < c.length(); ++i) {
    const Height d = c[i] - c[i + 1];
    if (d < 0) return false;
    if (d >= 2) {
      plateau_pairs = 0;
    } else if (d == 0) {
      if (++plateau_pairs == 2) return false;
    }
  }
  return true;
}

/// All canonical configurations with n grains that are reachable from (n):
/// the partitions of n passing is_reachable. Intended for small n.
inline std::vector<Configuration> reachable_configurations(std::int64_t n) {
  if (n < 0) throw std::invalid_argument("reachable_configurations: negative grain count");
  std::vector<Configuration> out;
  std::vector<Height> parts;
  auto recurse = [&](auto&& self, std::int64_t remaining, Height max_part) -> void {
    if (remaining == 0) {
      Configuration c{std::vector<Height>(parts)};
      if (is_reachable(c)) out.push_back(std::move(c));
      return;
    }
    for (Height part = std::min<Height>(max_part, remaining); part >= 1; --part) {
      parts.push_back(part);
      self(self, remaining - part, part);
      parts.pop_back();
    }
  };
  recurse(recurse, n, n);
  if (n == 0) out.push_back(Configuration{});
  return out;
}

/// All configurations reachable from a root, with one directed edge per rule
/// application (sequential mode) or one edge per synchronous step (parallel).
/// Vertices are canonical; vertex 0 is the root.
struct OrbitGraph {
  std::vector<Configuration> vertices;
  std::vector<std::pair<std::int32_t, std::int32_t>> edges;
  std::int32_t root = 0;
  ExecutionMode mode = ExecutionMode::sequential;

  std::int64_t vertex_count() const { return static_cast<std::int64_t>(vertices.size()); }
  std::int64_t edge_count() const { return static_cast<std::int64_t>(edges.size()); }

  std::vector<std::vector<std::int32_t>> adjacency() const {
    std::vector<std::vector<std::int32_t>> adj(vertices.size());
    for (auto [from, to] : edges) adj[static_cast<std::size_t>(from)].push_back(to);
    return adj;
  }

  /// Vertices with no outgoing edge.
  std::vector<std::int32_t> sinks() const {
    std::vector<char> has_out(vertices.size(), 0);
    for (auto [from, to] : edges) has_out[static_cast<std::size_t>(from)] = 1;
    std::vector<std::int32_t> out;
    for (std::size_t v = 0; v < vertices.size(); ++v) {
      if (!has_out[v]) out.push_back(static_cast<std::int32_t>(v));
    }
    return out;
  }
};

namespace detail {

struct ConfigurationHash {
  std::size_t operator()(const Configuration& c) const {
    return static_cast<std::size_t>(canonical_hash(c));
  }
};

}  // namespace detail

inline OrbitGraph build_orbit_graph(const Configuration& c, const Model& m, ExecutionMode mode,
                                    std::int64_t vertex_limit = 1'000'000) {
  if (vertex_limit <= 0) throw std::invalid_argument("build_orbit_graph: vertex_limit must be > 0");
  if (mode == ExecutionMode::parallel && m.kind != ModelKind::spm) {
    throw std::invalid_argument("build_orbit_graph: parallel mode is only defined for SPM");
  }
  OrbitGraph g;
  g.mode = mode;
  std::unordered_map<Configuration, std::int32_t, detail::ConfigurationHash> index;
  auto intern = [&](Configuration canon) -> std::int32_t {
    auto it = index.find(canon);
    if (it != index.end()) return it->second;
    if (g.vertex_count() >= vertex_limit) {
      throw VertexLimitError("build_orbit_graph: vertex limit exceeded");
    }
    const auto id = static_cast<std::int32_t>(g.vertices.size());
    index.emplace(canon, id);
    g.vertices.push_back(std::move(canon));
    return id;
  };

  g.root = intern(c.canonical());
  std::queue<std::int32_t> frontier;
  frontier.push(g.root);
  while (!frontier.empty()) {
    const std::int32_t v = frontier.front();
    frontier.pop();
    const Configuration current = g.vertices[static_cast<std::size_t>(v)];
    std::vector<Configuration> successors;
    if (mode == ExecutionMode::sequential) {
      for (const Move& mv : applicable_moves(current, m)) {
        successors.push_back(apply_move(current, mv).canonical());
      }
    } else {
      const Configuration next = step_parallel(current, m).canonical();
      if (next != current) successors.push_back(next);
    }
    for (Configuration& next : successors) {
      const bool seen = index.contains(next);
      const std::int32_t to = intern(std::move(next));
      g.edges.emplace_back(v, to);
      if (!seen) frontier.push(to);
    }
  }
  return g;
}

namespace detail {

// Reachability bitsets stored per vertex, indexed by topological position so
// the extremal candidate of a set is its first (or last) set bit.
struct Closure {
  std::int64_t words = 0;
  std::vector<std::int32_t> topo;      // topo[pos] = vertex
  std::vector<std::int32_t> position;  // position[vertex] = pos
  std::vector<std::uint64_t> down;     // positions reachable from pos (inclusive)
  std::vector<std::uint64_t> up;       // positions that reach pos (inclusive)

  std::uint64_t* down_row(std::int64_t pos) { return down.data() + pos * words; }
  std::uint64_t* up_row(std::int64_t pos) { return up.data() + pos * words; }
};

inline Closure transitive_closure(const OrbitGraph& g) {
  const std::int64_t n = g.vertex_count();
  Closure cl;
  cl.words = (n + 63) / 64;

  // Kahn topological sort; leftover vertices mean a cycle.
  std::vector<std::int32_t> indegree(static_cast<std::size_t>(n), 0);
  for (auto [from, to] : g.edges) ++indegree[static_cast<std::size_t>(to)];
  std::queue<std::int32_t> ready;
  for (std::int64_t v = 0; v < n; ++v) {
    if (indegree[static_cast<std::size_t>(v)] == 0) ready.push(static_cast<std::int32_t>(v));
  }
  const auto adj = g.adjacency();
  cl.topo.reserve(static_cast<std::size_t>(n));
  while (!ready.empty()) {
    const std::int32_t v = ready.front();
    ready.pop();
    cl.topo.push_back(v);
    for (std::int32_t w : adj[static_cast<std::size_t>(v)]) {
      if (--indegree[static_cast<std::size_t>(w)] == 0) ready.push(w);
    }
  }
  if (std::ssize(cl.topo) != n) {
    throw std::invalid_argument("transitive_closure: graph has a cycle");
  }
  cl.position.assign(static_cast<std::size_t>(n), 0);
  for (std::int64_t pos = 0; pos < n; ++pos) {
    cl.position[static_cast<std::size_t>(cl.topo[static_cast<std::size_t>(pos)])] =
        static_cast<std::int32_t>(pos);
  }

  cl.down.assign(static_cast<std::size_t>(n * cl.words), 0);
  cl.up.assign(static_cast<std::size_t>(n * cl.words), 0);
  auto set_bit = [&](std::uint64_t* row, std::int64_t pos) {
    row[pos / 64] |= std::uint64_t{1} << (pos % 64);
  };
  auto or_into = [&](std::uint64_t* dst, const std::uint64_t* src) {
    for (std::int64_t w = 0; w < cl.words; ++w) dst[w] |= src[w];
  };
  for (std::int64_t i = n - 1; i >= 0; --i) {
    const std::int32_t v = cl.topo[static_cast<std::size_t>(i)];
    set_bit(cl.down_row(i), i);
    for (std::int32_t w : adj[static_cast<std::size_t>(v)]) {
      or_into(cl.down_row(i), cl.down_row(cl.position[static_cast<std::size_t>(w)]));
    }
  }
  std::vector<std::vector<std::int32_t>> parents(static_cast<std::size_t>(n));
  for (auto [from, to] : g.edges) parents[static_cast<std::size_t>(to)].push_back(from);
  for (std::int64_t i = 0; i < n; ++i) {
    const std::int32_t v = cl.topo[static_cast<std::size_t>(i)];
    set_bit(cl.up_row(i), i);
    for (std::int32_t u : parents[static_cast<std::size_t>(v)]) {
      or_into(cl.up_row(i), cl.up_row(cl.position[static_cast<std::size_t>(u)]));
    }
  }
  return cl;
}

inline std::int64_t first_bit(const std::uint64_t* row, std::int64_t words) {
  for (std::int64_t w = 0; w < words; ++w) {
    if (row[w]) return w * 64 + std::countr_zero(row[w]);
  }
  return -1;
}

inline std::int64_t last_bit(const std::uint64_t* row, std::int64_t words) {
  for (std::int64_t w = words - 1; w >= 0; --w) {
    if (row[w]) return w * 64 + 63 - std::countl_zero(row[w]);
  }
  return -1;
}

}  // namespace detail

/// True iff the reachability partial order on the vertices gives every pair a
/// unique meet and join. Quadratic in the vertex count over the transitive
/// closure, fine up to a few thousand vertices. Throws on cyclic input.
inline bool is_lattice(const OrbitGraph& g) {
  const std::int64_t n = g.vertex_count();
  if (n <= 1) return true;
  auto cl = detail::transitive_closure(g);
  const std::int64_t words = cl.words;
  std::vector<std::uint64_t> common(static_cast<std::size_t>(words));

  // The meet of (a, b), if any, is the topologically first common descendant
  // and must itself reach every common descendant; dually for the join.
  auto has_extremum = [&](const std::uint64_t* ra, const std::uint64_t* rb, bool meet) {
    for (std::int64_t w = 0; w < words; ++w) common[static_cast<std::size_t>(w)] = ra[w] & rb[w];
    const std::int64_t cand = meet ? detail::first_bit(common.data(), words)
                                   : detail::last_bit(common.data(), words);
    if (cand < 0) return false;
    const std::uint64_t* crow = meet ? cl.down_row(cand) : cl.up_row(cand);
    for (std::int64_t w = 0; w < words; ++w) {
      if ((common[static_cast<std::size_t>(w)] & ~crow[w]) != 0) return false;
    }
    return true;
  };

  for (std::int64_t a = 0; a < n; ++a) {
    for (std::int64_t b = a + 1; b < n; ++b) {
      if (!has_extremum(cl.down_row(a), cl.down_row(b), true)) return false;
      if (!has_extremum(cl.up_row(a), cl.up_row(b), false)) return false;
    }
  }
  return true;
}

/// True iff all paths between any two vertices have equal length, i.e. every
/// edge advances the BFS level from the root by exactly one. For sequential
/// SPM orbits this certifies that the transient is order-independent.
inline bool is_graded(const OrbitGraph& g) {
  const std::int64_t n = g.vertex_count();
  std::vector<std::int64_t> level(static_cast<std::size_t>(n), -1);
  level[static_cast<std::size_t>(g.root)] = 0;
  std::queue<std::int32_t> frontier;
  frontier.push(g.root);
  const auto adj = g.adjacency();
  while (!frontier.empty()) {
    const std::int32_t v = frontier.front();
    frontier.pop();
    for (std::int32_t w : adj[static_cast<std::size_t>(v)]) {
      if (level[static_cast<std::size_t>(w)] < 0) {
        level[static_cast<std::size_t>(w)] = level[static_cast<std::size_t>(v)] + 1;
        frontier.push(w);
      }
    }
  }
  for (auto [from, to] : g.edges) {
    if (level[static_cast<std::size_t>(to)] != level[static_cast<std::size_t>(from)] + 1) {
      return false;
    }
  }
  return true;
}

/// Induced subgraph on the vertices of canonical length <= max_length,
/// keeping all edges between them. The root must survive the restriction.
inline OrbitGraph restrict_to_length(const OrbitGraph& g, std::int64_t max_length) {
  std::vector<std::int32_t> remap(g.vertices.size(), -1);
  OrbitGraph out;
  out.mode = g.mode;
  for (std::size_t v = 0; v < g.vertices.size(); ++v) {
    if (g.vertices[v].length() <= max_length) {
      remap[v] = static_cast<std::int32_t>(out.vertices.size());
      out.vertices.push_back(g.vertices[v]);
    }
  }
  if (remap[static_cast<std::size_t>(g.root)] < 0) {
    throw std::invalid_argument("restrict_to_length: root exceeds the length bound");
  }
  out.root = remap[static_cast<std::size_t>(g.root)];
  for (auto [from, to] : g.edges) {
    const std::int32_t nf = remap[static_cast<std::size_t>(from)];
    const std::int32_t nt = remap[static_cast<std::size_t>(to)];
    if (nf >= 0 && nt >= 0) out.edges.emplace_back(nf, nt);
  }
  return out;
}

/// Graphviz DOT; vertices labeled with comma-joined heights, edges unlabeled.
inline void write_dot(const OrbitGraph& g, std::ostream& os) {
  os << "digraph orbit {\n";
  for (std::size_t v = 0; v < g.vertices.size(); ++v) {
    os << "  v" << v << " [label=\"" << to_string(g.vertices[v]) << "\"];\n";
  }
  for (auto [from, to] : g.edges) os << "  v" << from << " -> v" << to << ";\n";
  os << "}\n";
}

inline std::string to_dot(const OrbitGraph& g) {
  std::ostringstream os;
  write_dot(g, os);
  return os.str();
}

/// Sequential transient, measured parallel transient, and the proven bounds
/// lower <= t_par <= upper for a single pile. The lower bound t_seq/(p-1)
/// only applies for p >= 2; below that it degenerates to zero.
struct TransientReport {
  std::int64_t t_seq = 0;
  std::int64_t t_par = 0;
  std::int64_t lower = 0;
  std::int64_t upper = 0;
};

inline TransientReport single_pile_transient_report(std::int64_t n,
                                                    std::int64_t step_limit = kDefaultStepLimit) {
  TransientReport r;
  r.t_seq = single_pile_transient_seq(n);
  r.t_par = run_to_fixpoint(Configuration{std::vector<Height>{n}}, Model::spm(),
                            ExecutionMode::parallel, step_limit)
                .steps;
  const auto [p, k] = triangular_decomposition(n);
  r.lower = p >= 2 ? ceil_div(r.t_seq, p - 1) : 0;
  r.upper = r.t_seq;
  return r;
}

}  // namespace sandpile
