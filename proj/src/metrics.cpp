#include "labtrick/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "labtrick/errors.hpp"

namespace labtrick {

double hits_at_k(std::span<const double> pos_scores, std::span<const double> neg_scores, std::size_t k) {
  if (k == 0) throw InvalidArgument("K must be at least 1");
  if (neg_scores.size() < k) {
    throw InvalidArgument("hits@" + std::to_string(k) + " needs at least K negatives, got " +
                          std::to_string(neg_scores.size()));
  }
  if (pos_scores.empty()) throw InvalidArgument("hits@K needs at least one positive");
  std::vector<double> neg(neg_scores.begin(), neg_scores.end());
  std::nth_element(neg.begin(), neg.begin() + static_cast<std::ptrdiff_t>(k - 1), neg.end(), std::greater<>());
  const double threshold = neg[k - 1];
  auto hits = std::count_if(pos_scores.begin(), pos_scores.end(), [&](double s) { return s > threshold; });
  return static_cast<double>(hits) / static_cast<double>(pos_scores.size());
}

std::size_t pessimistic_rank(const RankGroup& group) {
  auto above = std::count_if(group.negative_scores.begin(), group.negative_scores.end(),
                             [&](double s) { return s >= group.true_score; });
  return 1 + static_cast<std::size_t>(above);
}

double mrr(std::span<const RankGroup> groups) {
  if (groups.empty()) throw InvalidArgument("mrr needs at least one group");
  double total = 0.0;
  for (const auto& g : groups) total += 1.0 / static_cast<double>(pessimistic_rank(g));
  return total / static_cast<double>(groups.size());
}

EdgeSplit split_edges(const Graph& g, SplitRatios ratios, std::size_t neg_per_pos, std::uint64_t seed) {
  if (ratios.train <= 0 || ratios.valid <= 0 || ratios.test <= 0 ||
      std::abs(ratios.train + ratios.valid + ratios.test - 1.0) > 1e-9) {
    throw InvalidArgument("split ratios must be positive and sum to 1");
  }
  std::mt19937_64 rng(seed);
  auto edges = g.edges();
  std::shuffle(edges.begin(), edges.end(), rng);
  const std::size_t m = edges.size();
  const auto n_valid = static_cast<std::size_t>(std::floor(ratios.valid * static_cast<double>(m) + 1e-9));
  const auto n_test = static_cast<std::size_t>(std::floor(ratios.test * static_cast<double>(m) + 1e-9));

  EdgeSplit split;
  split.seed = seed;
  split.valid.assign(edges.begin(), edges.begin() + static_cast<std::ptrdiff_t>(n_valid));
  split.test.assign(edges.begin() + static_cast<std::ptrdiff_t>(n_valid),
                    edges.begin() + static_cast<std::ptrdiff_t>(n_valid + n_test));
  split.train.assign(edges.begin() + static_cast<std::ptrdiff_t>(n_valid + n_test), edges.end());

  const std::size_t n = g.num_nodes();
  const std::size_t needed = neg_per_pos * (n_valid + n_test);
  const std::size_t non_edges = n < 2 ? 0 : n * (n - 1) / 2 - m;
  if (needed > non_edges) {
    throw CapacityError("graph has " + std::to_string(non_edges) + " non-edges, " + std::to_string(needed) +
                        " negatives requested");
  }
  std::set<Edge> taken;
  std::uniform_int_distribution<NodeId> pick(0, static_cast<NodeId>(n - 1));
  auto draw = [&](std::size_t count, std::vector<Edge>& out) {
    while (out.size() < count) {
      NodeId a = pick(rng), b = pick(rng);
      if (a == b || g.has_edge(a, b)) continue;
      Edge e{std::min(a, b), std::max(a, b)};
      if (!taken.insert(e).second) continue;
      out.push_back(e);
    }
  };
  draw(neg_per_pos * n_valid, split.valid_negatives);
  draw(neg_per_pos * n_test, split.test_negatives);
  return split;
}

Graph graph_from_edge_subset(std::size_t num_nodes, std::span<const Edge> edges, const Graph* features_from) {
  Graph out = Graph::from_edges(num_nodes, edges);
  if (features_from && features_from->has_features()) out = out.with_features(features_from->features());
  return out;
}

}  // namespace labtrick
