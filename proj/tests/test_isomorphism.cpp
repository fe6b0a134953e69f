#include <doctest.h>

#include <algorithm>
#include <map>
#include <numeric>

#include "labtrick/errors.hpp"
#include "labtrick/generators.hpp"
#include "labtrick/heuristics.hpp"
#include "labtrick/isomorphism.hpp"

using namespace labtrick;

namespace {

// Tries all n! bijections.
bool brute_isomorphic(const Graph& a, const TargetSet& sa, const Graph& b, const TargetSet& sb) {
  if (a.num_nodes() != b.num_nodes() || a.num_edges() != b.num_edges() || sa.size() != sb.size()) return false;
  std::vector<NodeId> p(a.num_nodes());
  std::iota(p.begin(), p.end(), NodeId{0});
  do {
    bool ok = true;
    for (auto [u, v] : b.edges()) {
      if (!a.has_edge(p[u], p[v])) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    std::vector<NodeId> mapped;
    for (NodeId t : sb.nodes()) mapped.push_back(p[t]);
    if (TargetSet(mapped).same_set(sa)) return true;
  } while (std::next_permutation(p.begin(), p.end()));
  return false;
}

bool is_witness(const Graph& a, const TargetSet& sa, const Graph& b, const TargetSet& sb, const Permutation& pi) {
  if (apply_permutation(b, pi) != Graph::from_edges(a.num_nodes(), a.edges())) return false;
  return sb.mapped(pi).same_set(sa);
}

}  // namespace

TEST_CASE("two-triangle relations") {
  const auto f = two_triangle_graph();
  const Graph& g = f.graph;
  CHECK(g.num_edges() == 7);
  const TargetSet a{f.v1, f.v2}, b{f.v1, f.v3}, c{f.v4, f.v3};
  auto w = are_isomorphic(g, a, g, c);
  REQUIRE(w.has_value());
  CHECK(is_witness(g, a, g, c, *w));
  CHECK_FALSE(are_isomorphic(g, a, g, b).has_value());
  CHECK(are_isomorphic(g, TargetSet{f.v2}, g, TargetSet{f.v3}).has_value());
  CHECK(common_neighbors(g, f.v1, f.v2) == 1);
  CHECK(common_neighbors(g, f.v1, f.v3) == 0);
}

TEST_CASE("oracle basics") {
  Rng rng(1);
  for (int i = 0; i < 50; ++i) {
    const Graph g = random_gnp(8, 0.4, rng);
    const TargetSet s{0, 3};
    auto self = are_isomorphic(g, s, g, s);
    REQUIRE(self.has_value());
    CHECK(is_witness(g, s, g, s, *self));
  }
  const Graph big = path_graph(kOracleNodeLimit + 1);
  CHECK_THROWS_AS(are_isomorphic(big, TargetSet{0}, big, TargetSet{0}), CapacityError);
  CHECK_THROWS_AS(canonical_code(big, {}, TargetSet{}), CapacityError);
}

TEST_CASE("colors must be preserved") {
  const Graph p = path_graph(3);
  const TargetSet none;
  const Color c1[] = {1, 0, 0};
  const Color c2[] = {0, 0, 1};
  const Color c3[] = {0, 1, 0};
  CHECK(are_isomorphic(ColoredView{p, none, c1}, ColoredView{p, none, c2}).has_value());
  CHECK_FALSE(are_isomorphic(ColoredView{p, none, c1}, ColoredView{p, none, c3}).has_value());
  CHECK(canonical_code(p, c1, none) == canonical_code(p, c2, none));
  CHECK(canonical_code(p, c1, none) != canonical_code(p, c3, none));
}

TEST_CASE("oracle agrees with brute force on random pairs") {
  Rng rng(2);
  std::size_t positives = 0;
  for (int i = 0; i < 300; ++i) {
    const std::size_t n = 6;
    const Graph a = random_gnp(n, 0.5, rng);
    // half the time compare against a relabeled copy
    const Graph b = i % 2 ? apply_permutation(a, random_permutation(n, rng)) : random_gnp(n, 0.5, rng);
    const TargetSet sa{0, 1}, sb{static_cast<NodeId>(i % n), static_cast<NodeId>((i + 1) % n)};
    const bool expect = brute_isomorphic(a, sa, b, sb);
    auto got = are_isomorphic(a, sa, b, sb);
    CHECK(got.has_value() == expect);
    if (got) {
      ++positives;
      CHECK(is_witness(a, sa, b, sb, *got));
    }
    CHECK(are_isomorphic(b, sb, a, sa).has_value() == expect);
  }
  CHECK(positives > 10);
}

TEST_CASE("automorphism enumeration") {
  const Graph c = cycle_graph(5);
  const TargetSet none;
  std::size_t count = for_each_isomorphism({c, none}, {c, none}, [](const Permutation&) { return true; });
  CHECK(count == 10);
  const Graph k = complete_graph(4);
  count = for_each_isomorphism({k, TargetSet{0, 1}}, {k, TargetSet{0, 1}}, [](const Permutation&) { return true; });
  CHECK(count == 4);
  std::size_t seen = 0;
  for_each_isomorphism({k, none}, {k, none}, [&](const Permutation&) { return ++seen < 3; });
  CHECK(seen == 3);
}

TEST_CASE("canonical codes") {
  SUBCASE("examples") {
    const TargetSet none;
    CHECK(canonical_code(complete_graph(3), {}, none) != canonical_code(path_graph(3), {}, none));
    const auto f = two_triangle_graph();
    const auto a = canonical_code(f.graph, {}, TargetSet{f.v1, f.v2});
    CHECK(a == canonical_code(f.graph, {}, TargetSet{f.v4, f.v3}));
    CHECK(a != canonical_code(f.graph, {}, TargetSet{f.v1, f.v3}));
    CHECK(canonical_code(f.graph, {}, TargetSet{f.v1, f.v2}) == canonical_code(f.graph, {}, TargetSet{f.v2, f.v1}));
  }
  SUBCASE("relabelings give identical codes") {
    Rng rng(4);
    for (int i = 0; i < 200; ++i) {
      const std::size_t n = 3 + i % 6;
      const Graph g = random_gnp(n, 0.4, rng);
      std::vector<Color> colors(n);
      for (auto& c : colors) c = rng() % 3;
      const auto p = random_permutation(n, rng);
      std::vector<Color> moved(n);
      for (NodeId v = 0; v < n; ++v) moved[p(v)] = colors[v];
      const TargetSet s{0, 1};
      CHECK(canonical_code(g, colors, s) == canonical_code(apply_permutation(g, p), moved, s.mapped(p)));
    }
  }
  SUBCASE("exhaustive agreement with the oracle, n <= 5") {
    for (std::size_t n = 1; n <= 5; ++n) {
      const auto graphs = all_graphs(n);
      std::map<CanonicalCode, std::size_t> rep;
      for (std::size_t i = 0; i < graphs.size(); ++i) {
        const auto code = canonical_code(graphs[i], {}, TargetSet{});
        auto [it, fresh] = rep.emplace(code, i);
        if (!fresh) CHECK(are_isomorphic(graphs[it->second], TargetSet{}, graphs[i], TargetSet{}).has_value());
      }
      std::vector<std::size_t> reps;
      for (auto& [code, i] : rep) reps.push_back(i);
      for (std::size_t x = 0; x < reps.size(); ++x) {
        for (std::size_t y = x + 1; y < reps.size(); ++y) {
          CHECK_FALSE(are_isomorphic(graphs[reps[x]], TargetSet{}, graphs[reps[y]], TargetSet{}).has_value());
        }
      }
      // unlabeled graph counts on 1..5 nodes
      const std::size_t expected[] = {0, 1, 2, 4, 11, 34};
      CHECK(rep.size() == expected[n]);
    }
  }
  SUBCASE("agreement with the oracle on random graphs, n in {6, 7}") {
    Rng rng(6);
    std::size_t equal = 0;
    for (int i = 0; i < 1000; ++i) {
      const std::size_t n = 6 + i % 2;
      const Graph a = random_gnp(n, 0.5, rng);
      const TargetSet s{0, static_cast<NodeId>(1 + i % (n - 1))};
      const auto perm = random_permutation(n, rng);
      const bool relabel = i % 3 == 0;
      const Graph b = relabel ? apply_permutation(a, perm) : random_gnp(n, 0.5, rng);
      const TargetSet t = relabel ? s.mapped(perm) : TargetSet{static_cast<NodeId>(i % n), static_cast<NodeId>((i + 2) % n)};
      const bool same_code = canonical_code(a, {}, s) == canonical_code(b, {}, t);
      CHECK(same_code == are_isomorphic(a, s, b, t).has_value());
      equal += same_code;
    }
    CHECK(equal >= 333);
  }
}
