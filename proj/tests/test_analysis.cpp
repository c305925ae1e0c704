#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "sandpile/analysis.hpp"
#include "sandpile/harness.hpp"

using namespace sandpile;

namespace {

// Independent oracle: scan all staircase sizes instead of using isqrt.
TriangularDecomposition brute_force_decomposition(std::int64_t n) {
  for (std::int64_t p = 0;; ++p) {
    if (triangular(p) <= n && n - triangular(p) <= p) {
      return TriangularDecomposition{p, n - triangular(p)};
    }
  }
}

std::int64_t bfs_sink_level(const OrbitGraph& g) {
  const auto adj = g.adjacency();
  std::vector<std::int64_t> level(g.vertices.size(), -1);
  level[static_cast<std::size_t>(g.root)] = 0;
  std::vector<std::int32_t> frontier{g.root};
  std::int64_t sink_level = -1;
  while (!frontier.empty()) {
    std::vector<std::int32_t> next;
    for (std::int32_t v : frontier) {
      if (adj[static_cast<std::size_t>(v)].empty()) sink_level = level[static_cast<std::size_t>(v)];
      for (std::int32_t w : adj[static_cast<std::size_t>(v)]) {
        if (level[static_cast<std::size_t>(w)] < 0) {
          level[static_cast<std::size_t>(w)] = level[static_cast<std::size_t>(v)] + 1;
          next.push_back(w);
        }
      }
    }
    frontier = std::move(next);
  }
  return sink_level;
}

std::set<std::string> vertex_labels(const OrbitGraph& g) {
  std::set<std::string> labels;
  for (const Configuration& v : g.vertices) labels.insert(to_string(v));
  return labels;
}

}  // namespace

TEST_CASE("triangular decomposition") {
  CHECK(triangular_decomposition(8) == TriangularDecomposition{3, 2});
  CHECK(triangular_decomposition(10) == TriangularDecomposition{4, 0});
  CHECK(triangular_decomposition(0) == TriangularDecomposition{0, 0});
  CHECK_THROWS_AS(triangular_decomposition(-1), std::invalid_argument);

  for (std::int64_t n = 0; n <= 2000; ++n) {
    const auto d = triangular_decomposition(n);
    REQUIRE(d == brute_force_decomposition(n));
    REQUIRE(d.excess + triangular(d.staircase) == n);
    REQUIRE(d.excess >= 0);
    REQUIRE(d.excess <= d.staircase);
  }
}

TEST_CASE("single pile closed forms") {
  CHECK(single_pile_fixpoint(8) == Configuration{3, 2, 2, 1});
  CHECK(single_pile_fixpoint(10) == Configuration{4, 3, 2, 1});
  CHECK(single_pile_fixpoint(0) == Configuration{});

  CHECK(single_pile_transient_seq(8) == 9);
  CHECK(single_pile_transient_seq(10) == 10);
  CHECK(single_pile_transient_seq(0) == 0);

  CHECK(single_pile_fixpoint_length(8) == 4);
  CHECK(single_pile_fixpoint_length(10) == 4);
  CHECK(single_pile_fixpoint_length(0) == 0);

  SECTION("agreement with the naive oracle") {
    for (std::int64_t n = 0; n <= 30; ++n) {
      const RunResult r =
          run_to_fixpoint(make_single_pile(n), Model::spm(), ExecutionMode::sequential);
      REQUIRE(single_pile_fixpoint(n) == r.fixpoint.canonical());
      REQUIRE(single_pile_transient_seq(n) == r.steps);
    }
  }

  SECTION("fixed point length matches the closed form") {
    for (std::int64_t n = 0; n <= 1000; ++n) {
      REQUIRE(single_pile_fixpoint(n).length() == single_pile_fixpoint_length(n));
    }
    // Full range without materializing the staircases: the length is p or
    // p+1 depending on whether the excess vanishes.
    bool all_match = true;
    for (std::int64_t n = 0; n <= 1'000'000; ++n) {
      const auto [p, k] = triangular_decomposition(n);
      all_match = all_match && (k == 0 ? p : p + 1) == single_pile_fixpoint_length(n);
    }
    CHECK(all_match);
    CHECK(single_pile_fixpoint_length(1'000'000) == 1414);
  }
}

TEST_CASE("reachability characterization") {
  CHECK(is_reachable(Configuration{3, 2, 2, 1}));
  CHECK_FALSE(is_reachable(Configuration{3, 3, 3}));
  CHECK_FALSE(is_reachable(Configuration{2, 2, 1, 1}));
  CHECK(is_reachable(Configuration{3, 3}));
  CHECK_FALSE(is_reachable(Configuration{1, 2}));
  CHECK(is_reachable(Configuration{}));
  CHECK(is_reachable(Configuration{4, 4, 2, 2}));
  CHECK_FALSE(is_reachable(Configuration{4, 4, 3, 3}));

  SECTION("the orbit vertex set is exactly the reachable set") {
    for (std::int64_t n = 0; n <= 12; ++n) {
      const OrbitGraph g = build_orbit_graph(make_single_pile(n), Model::spm(),
                                             ExecutionMode::sequential);
      std::set<std::string> expected;
      for (const Configuration& c : reachable_configurations(n)) expected.insert(to_string(c));
      REQUIRE(vertex_labels(g) == expected);
    }
  }
}

TEST_CASE("orbit graph of the single pile of 8") {
  const OrbitGraph g =
      build_orbit_graph(Configuration{8}, Model::spm(), ExecutionMode::sequential);

  const std::set<std::string> expected{"8",       "7,1",     "6,2",   "5,3",     "6,1,1",
                                       "4,4",     "5,2,1",   "4,3,1", "4,2,2",   "3,3,2",
                                       "4,2,1,1", "3,3,1,1", "3,2,2,1"};
  CHECK(g.vertex_count() == 13);
  CHECK(vertex_labels(g) == expected);
  CHECK(g.edge_count() == 15);

  const auto sinks = g.sinks();
  REQUIRE(sinks.size() == 1);
  CHECK(g.vertices[static_cast<std::size_t>(sinks[0])] == Configuration{3, 2, 2, 1});

  CHECK(is_lattice(g));
  CHECK(is_graded(g));
  CHECK(bfs_sink_level(g) == 9);

  SECTION("parallel orbit is a chain") {
    const OrbitGraph p =
        build_orbit_graph(Configuration{8}, Model::spm(), ExecutionMode::parallel);
    const std::vector<std::string> chain{"8",     "7,1",   "6,2",     "5,2,1",
                                         "4,3,1", "4,2,2", "3,3,1,1", "3,2,2,1"};
    REQUIRE(p.vertex_count() == 8);
    for (std::size_t i = 0; i < chain.size(); ++i) {
      CHECK(to_string(p.vertices[i]) == chain[i]);
    }
    CHECK(p.edge_count() == 7);
    CHECK(is_lattice(p));
  }

  SECTION("a fixed point has a one-vertex orbit") {
    const OrbitGraph s =
        build_orbit_graph(Configuration{3, 2, 2, 1}, Model::spm(), ExecutionMode::sequential);
    CHECK(s.vertex_count() == 1);
    CHECK(s.edge_count() == 0);
    CHECK(is_lattice(s));
  }

  SECTION("vertex limit") {
    CHECK_THROWS_AS(
        build_orbit_graph(Configuration{8}, Model::spm(), ExecutionMode::sequential, 5),
        VertexLimitError);
  }
}

TEST_CASE("is_lattice rejects non-lattices and cycles") {
  SECTION("two maximal elements over two minimal elements") {
    OrbitGraph g;
    g.vertices = {Configuration{4}, Configuration{3, 1}, Configuration{2, 2},
                  Configuration{2, 1, 1}};
    g.edges = {{0, 2}, {0, 3}, {1, 2}, {1, 3}};
    g.root = 0;
    CHECK_FALSE(is_lattice(g));
  }

  SECTION("cyclic input violates the precondition") {
    OrbitGraph g;
    g.vertices = {Configuration{1}, Configuration{2}};
    g.edges = {{0, 1}, {1, 0}};
    g.root = 0;
    CHECK_THROWS_AS(is_lattice(g), std::invalid_argument);
  }
}

TEST_CASE("length restriction") {
  const OrbitGraph g =
      build_orbit_graph(Configuration{8}, Model::spm(), ExecutionMode::sequential);

  SECTION("restriction to two columns") {
    const OrbitGraph r = restrict_to_length(g, 2);
    const std::set<std::string> expected{"8", "7,1", "6,2", "5,3", "4,4"};
    CHECK(vertex_labels(r) == expected);
    CHECK(r.edge_count() == 4);
    CHECK(is_lattice(r));
    const auto sinks = r.sinks();
    REQUIRE(sinks.size() == 1);
    const RunResult walled = run_to_fixpoint_walled(Configuration{8}, Model::spm(), 2);
    CHECK(r.vertices[static_cast<std::size_t>(sinks[0])] == walled.fixpoint.canonical());
  }

  SECTION("restriction at or beyond the fixed-point length is the identity") {
    const OrbitGraph r = restrict_to_length(g, 4);
    CHECK(r.vertex_count() == g.vertex_count());
    CHECK(r.edge_count() == g.edge_count());
  }

  SECTION("restriction to one column") {
    const OrbitGraph r = restrict_to_length(g, 1);
    CHECK(r.vertex_count() == 1);
    CHECK(r.edge_count() == 0);
  }
}

TEST_CASE("orbit graphs from arbitrary roots") {
  // Exhaustive over short, low configurations: unique sink, equal path
  // lengths, lattice order, sink equal to the naive fixed point.
  std::vector<Height> heights(5, 0);
  auto check_root = [](const Configuration& root) {
    if (root.grains() > 12) return;
    const OrbitGraph g = build_orbit_graph(root, Model::spm(), ExecutionMode::sequential);
    const auto sinks = g.sinks();
    REQUIRE(sinks.size() == 1);
    const RunResult naive = run_to_fixpoint(root, Model::spm(), ExecutionMode::sequential);
    REQUIRE(g.vertices[static_cast<std::size_t>(sinks[0])] == naive.fixpoint.canonical());
    REQUIRE(is_graded(g));
    REQUIRE(bfs_sink_level(g) == naive.steps);
    REQUIRE(is_lattice(g));
  };
  auto enumerate = [&](auto&& self, std::size_t i) -> void {
    if (i == heights.size()) {
      check_root(Configuration(std::vector<Height>(heights)));
      return;
    }
    for (Height h = 0; h <= 4; ++h) {
      heights[i] = h;
      self(self, i + 1);
    }
    heights[i] = 0;
  };
  enumerate(enumerate, 0);
}

TEST_CASE("ipm orbit graphs are lattices for small piles") {
  for (std::int64_t k = 1; k <= 3; ++k) {
    for (std::int64_t n = 0; n <= 10; ++n) {
      const OrbitGraph g = build_orbit_graph(make_single_pile(n), Model::ipm(k),
                                             ExecutionMode::sequential);
      REQUIRE(g.sinks().size() == 1);
      REQUIRE(is_lattice(g));
    }
  }
}

TEST_CASE("parallel transient bounds") {
  const TransientReport r8 = single_pile_transient_report(8);
  CHECK(r8.t_seq == 9);
  CHECK(r8.t_par == 7);

  for (std::int64_t n = 3; n <= 60; ++n) {
    const TransientReport r = single_pile_transient_report(n);
    const auto [p, k] = triangular_decomposition(n);
    REQUIRE(p >= 2);
    REQUIRE(r.t_par <= r.upper);
    REQUIRE(r.lower <= r.t_par);
    // The exact rational form of the lower bound.
    REQUIRE(r.t_seq <= r.t_par * (p - 1));
  }
}

TEST_CASE("dot export") {
  OrbitGraph single;
  single.vertices = {Configuration{3, 2, 2, 1}};
  single.root = 0;
  CHECK(to_dot(single) == "digraph orbit {\n  v0 [label=\"3,2,2,1\"];\n}\n");

  const OrbitGraph g =
      build_orbit_graph(Configuration{8}, Model::spm(), ExecutionMode::sequential);
  const std::string dot = to_dot(g);
  CHECK(dot.find("digraph orbit {") != std::string::npos);
  CHECK(dot.find("[label=\"3,2,2,1\"]") != std::string::npos);
  CHECK(dot.find(" -> ") != std::string::npos);
}
