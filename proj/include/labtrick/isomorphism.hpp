#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>

#include "labtrick/graph.hpp"

namespace labtrick {

using Color = std::uint64_t;

// Hard node-count limit of the brute-force oracle. Exhaustive agreement with
// the canonical code is only exercised up to 7 nodes.
inline constexpr std::size_t kOracleNodeLimit = 10;

// A graph with discrete node colors and a distinguished node set. An empty
// color span means all nodes share one color.
struct ColoredView {
  const Graph& graph;
  const TargetSet& targets;
  std::span<const Color> colors = {};
};

// Searches for pi : nodes(b) -> nodes(a) with pi(b.targets) = a.targets as a
// set, adjacency preserved and colors preserved. Throws CapacityError when
// either graph exceeds kOracleNodeLimit.
std::optional<Permutation> are_isomorphic(const ColoredView& a, const ColoredView& b);

std::optional<Permutation> are_isomorphic(const Graph& g1, const TargetSet& s1, const Graph& g2,
                                          const TargetSet& s2);

// Calls `visit` for every isomorphism b -> a (same constraints as
// are_isomorphic) until it returns false. Returns the number visited.
std::size_t for_each_isomorphism(const ColoredView& a, const ColoredView& b,
                                 const std::function<bool(const Permutation&)>& visit);

// Canonical invariant of (graph, colors, targets-as-a-set): equal exactly
// when are_isomorphic succeeds.
class CanonicalCode {
 public:
  CanonicalCode() = default;
  explicit CanonicalCode(std::string bytes) : bytes_(std::move(bytes)) {}
  const std::string& bytes() const noexcept { return bytes_; }
  std::string hex() const;
  friend auto operator<=>(const CanonicalCode&, const CanonicalCode&) = default;

 private:
  std::string bytes_;
};

CanonicalCode canonical_code(const Graph& g, std::span<const Color> colors, const TargetSet& targets);

}  // namespace labtrick
