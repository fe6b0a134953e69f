#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "labtrick/graph.hpp"

namespace labtrick {

using Rng = std::mt19937_64;

struct LinkItem {
  Graph graph;
  TargetSet targets;
};

Graph path_graph(std::size_t n);
Graph cycle_graph(std::size_t n);
Graph complete_graph(std::size_t n);
// Node 0 is the center.
Graph star_graph(std::size_t leaves);

// The graph whose adjacency upper triangle (row-major, i < j) is given by the
// bits of `mask`.
Graph graph_from_mask(std::size_t n, std::uint64_t mask);

// Every labeled graph on n nodes: 2^(n choose 2) of them. n <= 8.
std::vector<Graph> all_graphs(std::size_t n);

// All graphs with 2 <= n <= max_n paired with every 2-subset {i < j}.
std::vector<LinkItem> exhaustive_link_corpus(std::size_t max_n);

// `count` random G(n, p) graphs with n uniform in [min_n, max_n], each paired
// with a uniformly random 2-subset.
std::vector<LinkItem> sampled_link_corpus(std::size_t count, std::size_t min_n, std::size_t max_n,
                                          double edge_prob, std::uint64_t seed);

Graph random_gnp(std::size_t n, double p, Rng& rng);

// Uniform-ish random d-regular simple graph via the pairing model with
// restarts. Requires n * d even and d < n.
Graph random_regular(std::size_t n, std::size_t d, Rng& rng);

// Stochastic block model over consecutive blocks of the given sizes.
Graph stochastic_block(std::span<const std::size_t> block_sizes, double p_in, double p_out, Rng& rng);

Permutation random_permutation(std::size_t n, Rng& rng);

// Two triangles {v1,v2,u} and {v3,v4,w} joined by the bridge u-w. The swap
// v1<->v4, v2<->v3, u<->w is an automorphism.
struct TwoTriangleGraph {
  Graph graph;
  NodeId v1 = 0, v2 = 1, v3 = 2, v4 = 3, u = 4, w = 5;
};
TwoTriangleGraph two_triangle_graph();

}  // namespace labtrick
