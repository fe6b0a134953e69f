#include "labtrick/generators.hpp"

#include <algorithm>
#include <numeric>

#include "labtrick/errors.hpp"

namespace labtrick {

using EdgeVec = std::vector<std::pair<NodeId, NodeId>>;

Graph path_graph(std::size_t n) {
  EdgeVec e;
  for (std::size_t i = 1; i < n; ++i) e.emplace_back(static_cast<NodeId>(i - 1), static_cast<NodeId>(i));
  return Graph::from_edges(n, e);
}

Graph cycle_graph(std::size_t n) {
  EdgeVec e;
  for (std::size_t i = 0; i < n; ++i) e.emplace_back(static_cast<NodeId>(i), static_cast<NodeId>((i + 1) % n));
  return Graph::from_edges(n, e);
}

Graph complete_graph(std::size_t n) {
  EdgeVec e;
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = i + 1; j < n; ++j) e.emplace_back(i, j);
  }
  return Graph::from_edges(n, e);
}

Graph star_graph(std::size_t leaves) {
  EdgeVec e;
  for (NodeId i = 1; i <= leaves; ++i) e.emplace_back(0, i);
  return Graph::from_edges(leaves + 1, e);
}

Graph graph_from_mask(std::size_t n, std::uint64_t mask) {
  EdgeVec e;
  std::size_t bit = 0;
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = i + 1; j < n; ++j, ++bit) {
      if ((mask >> bit) & 1u) e.emplace_back(i, j);
    }
  }
  return Graph::from_edges(n, e);
}

std::vector<Graph> all_graphs(std::size_t n) {
  if (n > 8) throw CapacityError("exhaustive enumeration limited to 8 nodes");
  const std::size_t pairs = n * (n - (n > 0 ? 1 : 0)) / 2;
  std::vector<Graph> out;
  out.reserve(std::size_t{1} << pairs);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << pairs); ++mask) out.push_back(graph_from_mask(n, mask));
  return out;
}

std::vector<LinkItem> exhaustive_link_corpus(std::size_t max_n) {
  std::vector<LinkItem> out;
  for (std::size_t n = 2; n <= max_n; ++n) {
    for (const Graph& g : all_graphs(n)) {
      for (NodeId i = 0; i < n; ++i) {
        for (NodeId j = i + 1; j < n; ++j) out.push_back({g, TargetSet{i, j}});
      }
    }
  }
  return out;
}

Graph random_gnp(std::size_t n, double p, Rng& rng) {
  std::bernoulli_distribution coin(p);
  EdgeVec e;
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = i + 1; j < n; ++j) {
      if (coin(rng)) e.emplace_back(i, j);
    }
  }
  return Graph::from_edges(n, e);
}

std::vector<LinkItem> sampled_link_corpus(std::size_t count, std::size_t min_n, std::size_t max_n,
                                          double edge_prob, std::uint64_t seed) {
  if (min_n < 2 || max_n < min_n) throw InvalidArgument("bad corpus size range");
  Rng rng(seed);
  std::uniform_int_distribution<std::size_t> size_dist(min_n, max_n);
  std::vector<LinkItem> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    std::size_t n = size_dist(rng);
    Graph g = random_gnp(n, edge_prob, rng);
    std::uniform_int_distribution<NodeId> pick(0, static_cast<NodeId>(n - 1));
    NodeId a = pick(rng), b = pick(rng);
    while (b == a) b = pick(rng);
    out.push_back({std::move(g), TargetSet{a, b}});
  }
  return out;
}

Graph random_regular(std::size_t n, std::size_t d, Rng& rng) {
  if (d >= n || (n * d) % 2 != 0) throw InvalidArgument("no simple d-regular graph for these n, d");
  std::vector<NodeId> stubs;
  for (NodeId v = 0; v < n; ++v) stubs.insert(stubs.end(), d, v);
  for (int attempt = 0; attempt < 10000; ++attempt) {
    std::shuffle(stubs.begin(), stubs.end(), rng);
    EdgeVec e;
    bool simple = true;
    for (std::size_t i = 0; i < stubs.size() && simple; i += 2) {
      NodeId a = std::min(stubs[i], stubs[i + 1]);
      NodeId b = std::max(stubs[i], stubs[i + 1]);
      if (a == b) simple = false;
      e.emplace_back(a, b);
    }
    if (!simple) continue;
    std::sort(e.begin(), e.end());
    if (std::adjacent_find(e.begin(), e.end()) != e.end()) continue;
    return Graph::from_edges(n, e);
  }
  throw CapacityError("pairing model failed to produce a simple regular graph");
}

Graph stochastic_block(std::span<const std::size_t> block_sizes, double p_in, double p_out, Rng& rng) {
  std::vector<std::size_t> block_of;
  for (std::size_t b = 0; b < block_sizes.size(); ++b) block_of.insert(block_of.end(), block_sizes[b], b);
  const std::size_t n = block_of.size();
  std::bernoulli_distribution in(p_in), out(p_out);
  EdgeVec e;
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = i + 1; j < n; ++j) {
      bool hit = block_of[i] == block_of[j] ? in(rng) : out(rng);
      if (hit) e.emplace_back(i, j);
    }
  }
  return Graph::from_edges(n, e);
}

Permutation random_permutation(std::size_t n, Rng& rng) {
  std::vector<NodeId> m(n);
  std::iota(m.begin(), m.end(), NodeId{0});
  std::shuffle(m.begin(), m.end(), rng);
  return Permutation(std::move(m));
}

TwoTriangleGraph two_triangle_graph() {
  TwoTriangleGraph f;
  EdgeVec e{{f.v1, f.v2}, {f.v1, f.u}, {f.v2, f.u}, {f.v3, f.v4}, {f.v4, f.w}, {f.v3, f.w}, {f.u, f.w}};
  f.graph = Graph::from_edges(6, e);
  return f;
}

}  // namespace labtrick
