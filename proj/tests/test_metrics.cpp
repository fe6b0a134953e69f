#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "labtrick/errors.hpp"
#include "labtrick/generators.hpp"
#include "labtrick/metrics.hpp"

using namespace labtrick;

namespace {

// A positive is a hit when fewer than K negatives reach its score.
double hits_oracle(const std::vector<double>& pos, const std::vector<double>& neg, std::size_t k) {
  std::size_t hits = 0;
  for (double p : pos) hits += static_cast<std::size_t>(std::count_if(neg.begin(), neg.end(), [&](double n) { return n >= p; })) < k;
  return static_cast<double>(hits) / static_cast<double>(pos.size());
}

// Position of the true candidate after a full sort with ties against it.
double mrr_oracle(const std::vector<RankGroup>& groups) {
  double total = 0;
  for (const auto& g : groups) {
    std::vector<std::pair<double, int>> all;
    for (double n : g.negative_scores) all.emplace_back(n, 0);
    all.emplace_back(g.true_score, 1);
    std::sort(all.begin(), all.end(), [](auto a, auto b) { return a.first != b.first ? a.first > b.first : a.second < b.second; });
    const auto pos = std::find_if(all.begin(), all.end(), [](auto x) { return x.second == 1; }) - all.begin();
    total += 1.0 / static_cast<double>(pos + 1);
  }
  return total / static_cast<double>(groups.size());
}

}  // namespace

TEST_CASE("hits@K examples") {
  const std::vector<double> neg{1, 2, 4, 5};
  CHECK(hits_at_k(std::vector<double>{10}, std::vector<double>{1, 2, 3}, 1) == 1.0);
  CHECK(hits_at_k(std::vector<double>{3.0}, neg, 2) == 0.0);
  CHECK(hits_at_k(std::vector<double>{3.0}, neg, 3) == 1.0);
  CHECK(hits_at_k(std::vector<double>{4.0}, neg, 2) == 0.0);
  CHECK_THROWS_AS(hits_at_k(std::vector<double>{1}, neg, 5), InvalidArgument);
  CHECK_THROWS_AS(hits_at_k(std::vector<double>{1}, neg, 0), InvalidArgument);
  CHECK_THROWS_AS(hits_at_k(std::vector<double>{}, neg, 1), InvalidArgument);
}

TEST_CASE("mrr examples") {
  CHECK(mrr(std::vector<RankGroup>{{5, {1, 2}}}) == 1.0);
  const std::vector<RankGroup> ranks{{9, {1, 2}}, {2, {3, 1}}, {0, {1, 2, 3, -1}}};
  CHECK(mrr(ranks) == doctest::Approx((1 + 0.5 + 0.25) / 3).epsilon(1e-12));
  CHECK(pessimistic_rank({1, {1}}) == 2);
  CHECK(mrr(std::vector<RankGroup>{{1, {1}}}) == 0.5);
  CHECK_THROWS_AS(mrr(std::vector<RankGroup>{}), InvalidArgument);
}

TEST_CASE("metrics agree with sort-based oracles") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> coarse(0, 9);
  std::uniform_real_distribution<double> fine(-1, 1);
  for (int t = 0; t < 1000; ++t) {
    // coarse scores create plenty of ties
    auto draw = [&] { return t % 2 ? static_cast<double>(coarse(rng)) : fine(rng); };
    std::vector<double> pos(1 + t % 7), neg(5 + t % 20);
    for (auto& x : pos) x = draw();
    for (auto& x : neg) x = draw();
    for (std::size_t k = 1; k <= neg.size(); ++k) {
      const double h = hits_at_k(pos, neg, k);
      CHECK(h == hits_oracle(pos, neg, k));
      CHECK(h >= 0);
      CHECK(h <= 1);
      if (k < neg.size()) CHECK(h <= hits_at_k(pos, neg, k + 1));
      std::vector<double> sp(pos), sn(neg);
      for (auto& x : sp) x *= 3.5;
      for (auto& x : sn) x *= 3.5;
      CHECK(hits_at_k(sp, sn, k) == h);
    }
    std::vector<RankGroup> groups;
    for (double p : pos) groups.push_back({p, neg});
    const double m = mrr(groups);
    CHECK(m == doctest::Approx(mrr_oracle(groups)).epsilon(1e-15));
    CHECK(m > 0);
    CHECK(m <= 1);
    for (auto& g : groups) {
      g.true_score *= 0.25;
      for (auto& n : g.negative_scores) n *= 0.25;
    }
    CHECK(mrr(groups) == m);
  }
}

TEST_CASE("edge splits") {
  Rng rng(1);
  // exactly 100 edges
  Graph g;
  do {
    g = random_gnp(40, 0.128, rng);
  } while (g.num_edges() != 100);
  const auto s = split_edges(g, {}, 3, 7);
  CHECK(s.train.size() == 80);
  CHECK(s.valid.size() == 10);
  CHECK(s.test.size() == 10);
  CHECK(s.valid_negatives.size() == 30);
  CHECK(s.test_negatives.size() == 30);

  std::set<Edge> seen;
  for (const auto* part : {&s.train, &s.valid, &s.test}) {
    for (auto e : *part) {
      CHECK(g.has_edge(e.first, e.second));
      CHECK(seen.insert({std::min(e.first, e.second), std::max(e.first, e.second)}).second);
    }
  }
  std::set<Edge> negs;
  for (const auto* part : {&s.valid_negatives, &s.test_negatives}) {
    for (auto [u, v] : *part) {
      CHECK(u != v);
      CHECK_FALSE(g.has_edge(u, v));
      CHECK(negs.insert({std::min(u, v), std::max(u, v)}).second);
    }
  }
  const auto again = split_edges(g, {}, 3, 7);
  CHECK(again.train == s.train);
  CHECK(again.test_negatives == s.test_negatives);
  CHECK_FALSE(split_edges(g, {}, 3, 8).train == s.train);

  SUBCASE("ratios") {
    const auto odd = split_edges(g, {0.7, 0.2, 0.1}, 1, 1);
    CHECK(odd.valid.size() == 20);
    CHECK(odd.test.size() == 10);
    CHECK(odd.train.size() == 70);
    CHECK_THROWS_AS(split_edges(g, {0.5, 0.2, 0.2}, 1, 1), InvalidArgument);
    CHECK_THROWS_AS(split_edges(g, {1.0, 0.0, 0.0}, 1, 1), InvalidArgument);
  }
  SUBCASE("not enough non-edges") {
    CHECK_THROWS_AS(split_edges(complete_graph(6), {0.6, 0.2, 0.2}, 1, 1), CapacityError);
  }
  SUBCASE("training graph") {
    const Graph train = graph_from_edge_subset(g.num_nodes(), s.train);
    CHECK(train.num_edges() == 80);
    for (auto [u, v] : s.test) CHECK_FALSE(train.has_edge(u, v));
  }
}
