#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "labtrick/graph.hpp"

namespace labtrick {

using Edge = std::pair<NodeId, NodeId>;

// Fraction of positives scoring strictly above the K-th highest negative.
double hits_at_k(std::span<const double> pos_scores, std::span<const double> neg_scores, std::size_t k);

struct RankGroup {
  double true_score = 0.0;
  std::vector<double> negative_scores;
};

// Rank of the true candidate: 1 + #negatives scoring strictly higher + #ties
// (ties count against the true candidate).
std::size_t pessimistic_rank(const RankGroup& group);

double mrr(std::span<const RankGroup> groups);

struct SplitRatios {
  double train = 0.8;
  double valid = 0.1;
  double test = 0.1;
};

struct EdgeSplit {
  std::vector<Edge> train;
  std::vector<Edge> valid;
  std::vector<Edge> test;
  std::vector<Edge> valid_negatives;
  std::vector<Edge> test_negatives;
  std::uint64_t seed = 0;
};

// Shuffles the edges with `seed`; valid and test take floor(ratio * m) edges,
// train the rest. Each eval split gets neg_per_pos negatives per positive,
// drawn uniformly from non-edges of g without repetition across splits.
EdgeSplit split_edges(const Graph& g, SplitRatios ratios, std::size_t neg_per_pos, std::uint64_t seed);

// Graph on `num_nodes` nodes holding only `edges` (features copied if given).
Graph graph_from_edge_subset(std::size_t num_nodes, std::span<const Edge> edges, const Graph* features_from = nullptr);

}  // namespace labtrick
