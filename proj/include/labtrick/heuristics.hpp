#pragma once

#include <cstddef>

#include "labtrick/graph.hpp"

namespace labtrick {

// |adj(u) ∩ adj(v)|. Throws InvalidArgument when u == v.
std::size_t common_neighbors(const Graph& g, NodeId u, NodeId v);

// Sum over common neighbors z of 1 / ln(deg(z)), degrees taken in g.
double adamic_adar(const Graph& g, NodeId u, NodeId v);

}  // namespace labtrick
