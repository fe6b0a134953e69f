#include <doctest.h>

#include <map>
#include <set>

#include "labtrick/errors.hpp"
#include "labtrick/generators.hpp"
#include "labtrick/labeling.hpp"

using namespace labtrick;

namespace {

// Walks radius pairs by (dx + dy, min) and hands out 2, 3, ...
std::map<std::pair<Distance, Distance>, std::uint32_t> enumerate_drnl(Distance max_sum) {
  std::map<std::pair<Distance, Distance>, std::uint32_t> out;
  std::uint32_t label = 2;
  for (Distance d = 2; d <= max_sum; ++d) {
    for (Distance lo = 1; 2 * lo <= d; ++lo) {
      out[{lo, d - lo}] = label;
      out[{d - lo, lo}] = label;
      ++label;
    }
  }
  return out;
}

// x - a - y as a subgraph with targets x, y
Subgraph xay() { return extract_enclosing_subgraph(path_graph(3), TargetSet{0, 2}, 1); }

using Labels = std::vector<std::uint32_t>;

// Partition of nodes as a canonical vector of class ids.
template <typename Key>
std::vector<std::size_t> partition_of(const std::vector<Key>& keys) {
  std::map<Key, std::size_t> ids;
  std::vector<std::size_t> out;
  for (const auto& k : keys) out.push_back(ids.emplace(k, ids.size()).first->second);
  return out;
}

}  // namespace

TEST_CASE("drnl hash spot values") {
  CHECK(drnl_hash(1, 1) == 2);
  CHECK(drnl_hash(1, 2) == 3);
  CHECK(drnl_hash(2, 2) == 5);
  CHECK(drnl_hash(1, 4) == 6);
  CHECK(drnl_hash(2, 3) == 7);
  CHECK(drnl_hash(3, 2) == 7);
  CHECK_THROWS_AS(drnl_hash(0, 1), InvalidArgument);
  CHECK_THROWS_AS(drnl_hash(2, kInfDistance), InvalidArgument);
}

TEST_CASE("drnl hash equals the enumeration for every radius pair with dx + dy <= 100") {
  const auto oracle = enumerate_drnl(100);
  for (const auto& [pair, label] : oracle) CHECK(drnl_hash(pair.first, pair.second) == label);
}

TEST_CASE("drnl hash symmetric and injective on unordered pairs up to 50") {
  std::set<std::uint32_t> seen;
  for (Distance a = 1; a <= 50; ++a) {
    for (Distance b = a; b <= 50; ++b) {
      CHECK(drnl_hash(a, b) == drnl_hash(b, a));
      CHECK(seen.insert(drnl_hash(a, b)).second);
    }
  }
  CHECK(!seen.contains(0));
  CHECK(!seen.contains(1));
}

TEST_CASE("labeling a path x-a-y") {
  const auto sg = xay();
  REQUIRE(sg.parent_ids == std::vector<NodeId>{0, 2, 1});
  CHECK(apply_labeling(LabelingScheme::drnl(), sg).values() == Labels{1, 1, 2});
  CHECK(apply_labeling(LabelingScheme::zero_one(), sg).values() == Labels{1, 1, 0});
  CHECK(apply_labeling(LabelingScheme::all_one(), sg).values() == Labels{1, 1, 1});
  // unmasked: d(x, y) = 2 through a
  const auto de = apply_labeling(LabelingScheme::de(3), sg);
  CHECK(de.width() == 2);
  CHECK(de.values() == Labels{0, 2, 2, 0, 1, 1});
  CHECK(de.format(0) == "0,2");
  const auto dp = apply_labeling(LabelingScheme::de_plus(), sg);
  CHECK(dp.values() == Labels{0, 0, 0, 0, 1, 1});
}

TEST_CASE("unreachable nodes") {
  // x - a - y, plus b hanging off y only, plus isolated-by-masking c behind x
  const Graph g = Graph::from_edges(5, std::vector<std::pair<NodeId, NodeId>>{{0, 1}, {1, 2}, {2, 3}, {0, 4}});
  const auto sg = extract_enclosing_subgraph(g, TargetSet{0, 2}, 1);
  REQUIRE(sg.parent_ids == std::vector<NodeId>{0, 2, 1, 3, 4});
  CHECK(apply_labeling(LabelingScheme::drnl(), sg).values() == Labels{1, 1, 2, 0, 0});
  const auto capped = apply_labeling(LabelingScheme::de_plus(2), sg);
  CHECK(capped.at(3)[0] == 3);
  CHECK(capped.at(3)[1] == 1);
  const auto open = apply_labeling(LabelingScheme::de_plus(), sg);
  CHECK(open.at(3)[0] == kUnreachableCode);
  CHECK(open.format(3) == "inf,1");
  CHECK(open.max_finite_code() == 1);
  // de ignores masking: c reaches y through x
  const auto de = apply_labeling(LabelingScheme::de(3), sg);
  CHECK(de.at(4)[0] == 1);
  CHECK(de.at(4)[1] == 3);
  const auto de1 = apply_labeling(LabelingScheme::de(1), sg);
  CHECK(de1.at(4)[1] == 1);
}

TEST_CASE("scheme arguments") {
  CHECK_THROWS_AS(LabelingScheme::de(0).check(), InvalidArgument);
  CHECK_THROWS_AS((LabelingScheme{SchemeKind::drnl, 2}.check()), InvalidArgument);
  CHECK(parse_scheme("zo") == LabelingScheme::zero_one());
  CHECK(parse_scheme("de").d_max == 3u);
  CHECK(parse_scheme("de+") == LabelingScheme::de_plus());
  CHECK(parse_scheme("de+", 4) == LabelingScheme::de_plus(4));
  CHECK_THROWS_AS(parse_scheme("drnl", 3), InvalidArgument);
  CHECK_THROWS_AS(parse_scheme("bogus"), InvalidArgument);
  const auto single = extract_enclosing_subgraph(path_graph(3), TargetSet{1}, 1);
  CHECK_THROWS_AS(apply_labeling(LabelingScheme::drnl(), single), InvalidArgument);
  CHECK_THROWS_AS(apply_labeling(LabelingScheme::de(), single), InvalidArgument);
  CHECK(apply_labeling(LabelingScheme::zero_one(), single).values() == Labels{1, 0, 0});
}

TEST_CASE("valid schemes keep target labels apart from the rest") {
  Rng rng(8);
  for (int i = 0; i < 300; ++i) {
    const Graph g = random_gnp(10, 0.25, rng);
    const auto sg = extract_enclosing_subgraph(g, TargetSet{0, 1}, 2);
    for (const auto& scheme : {LabelingScheme::zero_one(), LabelingScheme::drnl(), LabelingScheme::de(),
                               LabelingScheme::de_plus(), LabelingScheme::de_plus(2)}) {
      const auto labels = apply_labeling(scheme, sg);
      std::set<std::vector<std::uint32_t>> inside, outside;
      for (NodeId v = 0; v < sg.num_nodes(); ++v) {
        auto l = labels.at(v);
        (sg.targets.contains(v) ? inside : outside).insert({l.begin(), l.end()});
      }
      for (const auto& l : inside) CHECK_FALSE(outside.contains(l));
    }
    const auto drnl = apply_labeling(LabelingScheme::drnl(), sg);
    CHECK(drnl.at(0)[0] == 1);
    CHECK(drnl.at(1)[0] == 1);
  }
}

TEST_CASE("labels are equivariant under relabeling") {
  Rng rng(12);
  for (int i = 0; i < 300; ++i) {
    const std::size_t n = 2 + i % 6;
    const Graph g = random_gnp(n, 0.4, rng);
    const TargetSet s{0, static_cast<NodeId>(n - 1)};
    for (int t = 0; t < 10; ++t) {
      const auto p = random_permutation(n, rng);
      for (const auto& scheme : {LabelingScheme::zero_one(), LabelingScheme::drnl(), LabelingScheme::de(),
                                 LabelingScheme::de_plus(), LabelingScheme::all_one()}) {
        CHECK(label_graph(scheme, apply_permutation(g, p), s.mapped(p)) == label_graph(scheme, g, s).permuted(p));
      }
    }
  }
}

TEST_CASE("uncapped de+ and drnl induce the same node partition") {
  Rng rng(21);
  for (int i = 0; i < 1000; ++i) {
    const Graph g = random_gnp(12, 0.2, rng);
    const auto sg = extract_enclosing_subgraph(g, TargetSet{0, 1}, 1 + i % 3);
    const auto drnl = apply_labeling(LabelingScheme::drnl(), sg);
    const auto dp = apply_labeling(LabelingScheme::de_plus(), sg);
    std::vector<std::uint32_t> a;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> sorted_pairs, ordered_pairs;
    const std::pair<std::uint32_t, std::uint32_t> null{kUnreachableCode, kUnreachableCode};
    for (NodeId v = 0; v < sg.num_nodes(); ++v) {
      a.push_back(drnl.at(v)[0]);
      auto [x, y] = std::pair{dp.at(v)[0], dp.at(v)[1]};
      ordered_pairs.emplace_back(x, y);
      if (x == kUnreachableCode || y == kUnreachableCode) {
        sorted_pairs.push_back(null);
      } else {
        sorted_pairs.emplace_back(std::min(x, y), std::max(x, y));
      }
    }
    CHECK(partition_of(a) == partition_of(sorted_pairs));
    // ordered pairs refine the drnl classes
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> owner;
    for (std::size_t v = 0; v < a.size(); ++v) {
      auto [it, fresh] = owner.emplace(ordered_pairs[v], a[v]);
      if (!fresh) CHECK(it->second == a[v]);
    }
  }
}

TEST_CASE("validity checker") {
  SUBCASE("zero-one on a sampled corpus") {
    const auto corpus = sampled_link_corpus(200, 2, 7, 0.4, 3);
    auto r = validate_labeling_scheme(LabelingScheme::zero_one(), corpus, 20, 1);
    CHECK(r.valid());
    CHECK(r.counterexamples.empty());
    CHECK(r.permutation_trials == 200 * 20);
  }
  SUBCASE("every valid scheme on all graphs up to 4 nodes") {
    const auto corpus = exhaustive_link_corpus(4);
    for (const auto& scheme : {LabelingScheme::zero_one(), LabelingScheme::drnl(), LabelingScheme::de(),
                               LabelingScheme::de_plus()}) {
      CAPTURE(scheme.name());
      CHECK(validate_labeling_scheme(scheme, corpus, 10, 2).valid());
    }
  }
  SUBCASE("all-one fails condition 1") {
    // path 0-1-2 with S = {0, 1}: the reflection moves S
    const std::vector<LinkItem> corpus{{path_graph(3), TargetSet{0, 1}}};
    auto r = validate_labeling_scheme(LabelingScheme::all_one(), corpus, 10, 1);
    CHECK_FALSE(r.condition1_holds());
    CHECK(r.condition2_holds());
    CHECK_FALSE(r.counterexamples.empty());
  }
  SUBCASE("counterexample cap") {
    const auto corpus = exhaustive_link_corpus(4);
    auto r = validate_labeling_scheme(LabelingScheme::all_one(), corpus, 2, 1, 3);
    CHECK(r.counterexamples.size() == 3);
    CHECK(r.target_mapping_violations > 3);
  }
}
