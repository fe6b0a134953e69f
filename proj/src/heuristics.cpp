#include "labtrick/heuristics.hpp"

#include <cmath>

#include "labtrick/errors.hpp"

namespace labtrick {
namespace {

void check_pair(const Graph& g, NodeId u, NodeId v) {
  if (u == v) throw InvalidArgument("heuristic needs two distinct nodes");
  if (u >= g.num_nodes() || v >= g.num_nodes()) throw InvalidArgument("node id out of range");
}

// Merge-walks two sorted neighbor lists.
template <typename Visit>
void for_each_common(const Graph& g, NodeId u, NodeId v, Visit&& visit) {
  auto a = g.neighbors(u);
  auto b = g.neighbors(v);
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j]) {
      ++i;
    } else if (b[j] < a[i]) {
      ++j;
    } else {
      visit(a[i]);
      ++i;
      ++j;
    }
  }
}

}  // namespace

std::size_t common_neighbors(const Graph& g, NodeId u, NodeId v) {
  check_pair(g, u, v);
  std::size_t count = 0;
  for_each_common(g, u, v, [&](NodeId) { ++count; });
  return count;
}

double adamic_adar(const Graph& g, NodeId u, NodeId v) {
  check_pair(g, u, v);
  double score = 0.0;
  for_each_common(g, u, v, [&](NodeId z) { score += 1.0 / std::log(static_cast<double>(g.degree(z))); });
  return score;
}

}  // namespace labtrick
