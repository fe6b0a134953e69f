#include <doctest.h>

#include <sstream>

#include "labtrick/errors.hpp"
#include "labtrick/generators.hpp"
#include "labtrick/graph.hpp"
#include "labtrick/isomorphism.hpp"

using namespace labtrick;

namespace {

using Edges = std::vector<std::pair<NodeId, NodeId>>;

Graph make(std::size_t n, Edges e) { return Graph::from_edges(n, e); }

std::vector<NodeId> nbrs(const Graph& g, NodeId v) {
  auto s = g.neighbors(v);
  return {s.begin(), s.end()};
}

void check_invariants(const Graph& g) {
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    auto adj = g.neighbors(v);
    for (std::size_t i = 0; i < adj.size(); ++i) {
      CHECK(adj[i] != v);
      CHECK(adj[i] < g.num_nodes());
      if (i > 0) CHECK(adj[i - 1] < adj[i]);
      CHECK(g.has_edge(adj[i], v));
    }
  }
}

}  // namespace

TEST_CASE("edge list parsing") {
  SUBCASE("path") {
    auto p = parse_edge_list_text("0 1\n1 2");
    CHECK(p.graph.num_nodes() == 3);
    CHECK(nbrs(p.graph, 1) == std::vector<NodeId>{0, 2});
  }
  SUBCASE("duplicates and self loops dropped") {
    auto p = parse_edge_list_text("0 1\n1 0\n0 0");
    CHECK(p.graph.num_nodes() == 2);
    CHECK(p.graph.edges() == Edges{{0, 1}});
    CHECK(p.report.self_loops_dropped == 1);
    CHECK(p.report.duplicates_dropped == 1);
  }
  SUBCASE("first-appearance remap") {
    auto p = parse_edge_list_text("5 9\n9 7");
    CHECK(p.original_ids == std::vector<std::uint64_t>{5, 9, 7});
    CHECK(p.graph.edges() == Edges{{0, 1}, {1, 2}});
  }
  SUBCASE("comments and blank lines") {
    auto p = parse_edge_list_text("# header\n\n3 4\n  # indented\n4 5\n");
    CHECK(p.graph.num_edges() == 2);
    CHECK(p.report.comment_lines == 2);
  }
  SUBCASE("empty input") { CHECK(parse_edge_list_text("").graph.num_nodes() == 0); }
  SUBCASE("malformed token names the line") {
    try {
      parse_edge_list_text("0 1\n1 x\n");
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
    }
    CHECK_THROWS_AS(parse_edge_list_text("0 1 2\n"), ParseError);
    CHECK_THROWS_AS(parse_edge_list_text("-1 2\n"), ParseError);
    CHECK_THROWS_AS(parse_edge_list_text("7\n"), ParseError);
  }
}

TEST_CASE("graph construction") {
  CHECK_THROWS_AS(make(2, {{0, 2}}), InvalidArgument);
  auto g = make(4, {{3, 0}, {0, 1}, {1, 0}, {2, 2}});
  CHECK(g.num_edges() == 2);
  CHECK(g.edges() == Edges{{0, 1}, {0, 3}});
  check_invariants(g);
  Rng rng(7);
  for (int i = 0; i < 50; ++i) check_invariants(random_gnp(12, 0.3, rng));
}

TEST_CASE("edge list round trip keeps original ids") {
  auto p = parse_edge_list_text("10 20\n20 30\n30 10\n");
  std::ostringstream out;
  auto edges = p.graph.edges();
  write_edge_list(out, edges, p.original_ids);
  auto q = parse_edge_list_text(out.str());
  CHECK(q.graph == p.graph);
  CHECK(q.original_ids == p.original_ids);
}

TEST_CASE("distance sentinel serializes as inf") {
  CHECK(format_distance(kInfDistance) == "inf");
  CHECK(format_distance(4) == "4");
  CHECK(parse_distance("inf") == kInfDistance);
  CHECK(parse_distance("12") == 12);
  CHECK_THROWS(parse_distance("x"));
}

TEST_CASE("feature csv") {
  std::istringstream in("1,2\n3.5,-4\n");
  auto f = parse_feature_csv(in);
  CHECK(f.rows() == 2);
  CHECK(f(1, 0) == 3.5);
  CHECK(f(1, 1) == -4);
  std::istringstream bad("1,2\n3\n");
  CHECK_THROWS_AS(parse_feature_csv(bad), ParseError);
  CHECK_THROWS(path_graph(3).with_features(f));
}

TEST_CASE("permutations") {
  CHECK_THROWS_AS(Permutation({0, 0, 1}), InvalidArgument);
  CHECK_THROWS_AS(Permutation({0, 3}), InvalidArgument);
  const Graph path = path_graph(3);
  CHECK(apply_permutation(path, Permutation::identity(3)) == path);
  CHECK(apply_permutation(path, Permutation({2, 1, 0})) == path);
  const Graph tp = make(4, {{0, 1}, {1, 2}, {0, 2}, {2, 3}});
  CHECK(apply_permutation(tp, Permutation({3, 2, 1, 0})).edges() == Edges{{0, 1}, {1, 2}, {1, 3}, {2, 3}});
  CHECK_THROWS_AS(apply_permutation(tp, Permutation::identity(3)), DimensionError);

  SUBCASE("features follow their node") {
    DenseMatrix f(3, 1);
    f(0, 0) = 10;
    f(1, 0) = 11;
    f(2, 0) = 12;
    auto g = apply_permutation(path.with_features(f), Permutation({1, 2, 0}));
    CHECK(g.features()(1, 0) == 10);
    CHECK(g.features()(2, 0) == 11);
    CHECK(g.features()(0, 0) == 12);
  }
  SUBCASE("inverse round trip") {
    Rng rng(3);
    for (int i = 0; i < 100; ++i) {
      const Graph g = random_gnp(9, 0.35, rng);
      const auto p = random_permutation(9, rng);
      CHECK(apply_permutation(apply_permutation(g, p), p.inverse()) == g);
    }
  }
}

TEST_CASE("masked bfs") {
  const Graph path = path_graph(3);
  const NodeId one[] = {1};
  CHECK(bfs_distances(path, 0) == std::vector<Distance>{0, 1, 2});
  CHECK(bfs_distances(path, 0, one) == std::vector<Distance>{0, kInfDistance, kInfDistance});
  CHECK(bfs_distances(cycle_graph(4), 0, one) == std::vector<Distance>{0, kInfDistance, 2, 1});
  const NodeId zero[] = {0};
  CHECK_THROWS_AS(bfs_distances(path, 0, zero), InvalidArgument);

  SUBCASE("edge triangle property") {
    Rng rng(11);
    for (int i = 0; i < 200; ++i) {
      const Graph g = random_gnp(14, 0.2, rng);
      const NodeId masked[] = {1, 5};
      const auto d = bfs_distances(g, 0, masked);
      for (auto [u, v] : g.edges()) {
        if (d[u] == kInfDistance || d[v] == kInfDistance) continue;
        CHECK(d[u] <= d[v] + 1);
        CHECK(d[v] <= d[u] + 1);
      }
    }
  }
}

TEST_CASE("enclosing subgraph extraction") {
  SUBCASE("triangle, h=1") {
    auto sg = extract_enclosing_subgraph(complete_graph(3), TargetSet{0, 1}, 1);
    CHECK(sg.num_nodes() == 3);
    CHECK(sg.graph.num_edges() == 3);
  }
  SUBCASE("star leaves, h=1") {
    // center 0, leaves a=1, b=2, e=3
    auto sg = extract_enclosing_subgraph(star_graph(3), TargetSet{1, 2}, 1);
    CHECK(sg.parent_ids == std::vector<NodeId>{1, 2, 0});
    CHECK(sg.graph.edges() == Edges{{0, 2}, {1, 2}});
    CHECK(sg.targets == TargetSet{0, 1});
  }
  SUBCASE("h=0 keeps only the targets") {
    auto with = extract_enclosing_subgraph(path_graph(4), TargetSet{0, 1}, 0);
    CHECK(with.num_nodes() == 2);
    CHECK(with.graph.num_edges() == 1);
    auto without = extract_enclosing_subgraph(path_graph(4), TargetSet{0, 2}, 0);
    CHECK(without.graph.num_edges() == 0);
  }
  SUBCASE("target link removal") {
    auto sg = extract_enclosing_subgraph(complete_graph(4), TargetSet{2, 3}, 1, {.remove_target_link = true});
    CHECK_FALSE(sg.graph.has_edge(0, 1));
    CHECK(sg.graph.num_edges() == 5);
  }
  SUBCASE("masked distances") {
    // path x-a-y plus a tail y-b
    auto sg = extract_enclosing_subgraph(path_graph(4), TargetSet{0, 2}, 1);
    REQUIRE(sg.parent_ids == std::vector<NodeId>{0, 2, 1, 3});
    CHECK(sg.dist_to_target[0] == std::vector<Distance>{0, kInfDistance, 1, kInfDistance});
    CHECK(sg.dist_to_target[1] == std::vector<Distance>{kInfDistance, 0, 1, 1});
  }
  SUBCASE("node set and induced edges against brute force") {
    Rng rng(5);
    for (int i = 0; i < 100; ++i) {
      const Graph g = random_gnp(15, 0.15, rng);
      const std::size_t h = i % 3;
      const TargetSet s{static_cast<NodeId>(i % 15), static_cast<NodeId>((i * 7 + 1) % 15)};
      if (s[0] == s[1]) continue;
      auto sg = extract_enclosing_subgraph(g, s, h);
      const auto d0 = bfs_distances(g, s[0]);
      const auto d1 = bfs_distances(g, s[1]);
      std::vector<NodeId> expect;
      for (NodeId v = 0; v < g.num_nodes(); ++v) {
        if (std::min(d0[v], d1[v]) <= h) expect.push_back(v);
      }
      auto got = sg.parent_ids;
      std::sort(got.begin(), got.end());
      CHECK(got == expect);
      for (NodeId a = 0; a < sg.num_nodes(); ++a) {
        for (NodeId b = 0; b < sg.num_nodes(); ++b) {
          if (a != b) CHECK(sg.graph.has_edge(a, b) == g.has_edge(sg.parent_ids[a], sg.parent_ids[b]));
        }
      }
    }
  }
  SUBCASE("relabeling commutes with extraction up to isomorphism") {
    Rng rng(9);
    for (int i = 0; i < 100; ++i) {
      const Graph g = random_gnp(9, 0.3, rng);
      const auto p = random_permutation(9, rng);
      const TargetSet s{0, 1};
      const std::size_t h = 1 + i % 2;
      auto a = extract_enclosing_subgraph(g, s, h);
      auto b = extract_enclosing_subgraph(apply_permutation(g, p), s.mapped(p), h);
      CHECK(are_isomorphic(a.graph, a.targets, b.graph, b.targets).has_value());
    }
  }
}
