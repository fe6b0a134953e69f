#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "labtrick/generators.hpp"
#include "labtrick/graph.hpp"
#include "labtrick/isomorphism.hpp"
#include "labtrick/labeling.hpp"

namespace labtrick {

// Per-round 1-WL colorings. rounds[0] is the re-indexed initial coloring;
// colors are dense and assigned in first-appearance order over node ids.
struct ColorTrace {
  std::vector<std::vector<std::uint32_t>> rounds;
  // First round t >= 1 whose partition equals that of round t-1, or the first
  // round whose partition is already discrete (it cannot refine further).
  // Equals rounds.size() - 1 when max_rounds ran out first.
  std::size_t converged_at = 0;
  bool converged = false;

  const std::vector<std::uint32_t>& final_colors() const { return rounds.back(); }
  std::size_t num_classes(std::size_t round) const;
};

ColorTrace wl_refine(const Graph& g, std::span<const Color> init_colors, std::size_t max_rounds);

// Interning table shared by several refinements so that colors from
// different graphs (or different labelings of one graph) are comparable.
// Not thread-safe; use one table per worker.
class ColorTable {
 public:
  // Colors after exactly `rounds` rounds (no early stop).
  std::vector<std::uint32_t> refine(const Graph& g, std::span<const Color> init_colors, std::size_t rounds);

 private:
  std::uint32_t intern_initial(Color c);
  std::map<Color, std::uint32_t> initial_;
  // rounds_[t-1] maps (previous color, sorted neighbor colors) to round-t color.
  std::vector<std::map<std::vector<std::uint32_t>, std::uint32_t>> rounds_;
};

// Discrete link code: sorted target colors followed by the (color, count)
// histogram of the whole (sub)graph. Comparable only between codes produced
// with the same ColorTable.
struct WlLinkCode {
  std::vector<std::uint64_t> words;
  friend auto operator<=>(const WlLinkCode&, const WlLinkCode&) = default;
};

// Optionally extracts the h-hop enclosing subgraph, uses the labeling (or a
// uniform coloring when `scheme` is empty) as initial colors and refines for
// `rounds` rounds. Throws InvalidArgument when rounds == 0.
WlLinkCode wl_link_code(ColorTable& table, const Graph& g, const TargetSet& targets,
                        const std::optional<LabelingScheme>& scheme, std::size_t rounds,
                        std::optional<std::size_t> hop = std::nullopt);

// Links (u, w) and (v, w) that an unlabeled `rounds`-round 1-WL cannot tell
// apart (u, v share a color) although w is adjacent to u and not to v.
struct IndistinguishablePair {
  NodeId u = 0;
  NodeId v = 0;
  NodeId w = 0;
};

struct PairCheck {
  bool same_color = false;
  bool w_adjacent_u_only = false;
  bool labeled_codes_differ = false;
  bool all() const noexcept { return same_color && w_adjacent_u_only && labeled_codes_differ; }
};

PairCheck check_indistinguishable_pair(const Graph& g, std::size_t rounds, const IndistinguishablePair& pair);

// Returns only pairs that pass all three clauses of check_indistinguishable_pair.
std::vector<IndistinguishablePair> find_indistinguishable_link_pairs(
    const Graph& g, std::size_t rounds, std::size_t max_pairs = std::numeric_limits<std::size_t>::max());

// Node-most-expressive surrogate: each target's orbit code on the labeled
// graph (canonical code with that single node distinguished), aggregated as a
// sorted multiset.
using StructuralLinkCode = std::vector<CanonicalCode>;
StructuralLinkCode structural_link_code(const Graph& g, const NodeLabels& labels, const TargetSet& targets);

struct StructuralViolation {
  std::size_t first = 0;
  std::size_t second = 0;
  // "equal-code-not-isomorphic" or "isomorphic-code-differs".
  std::string kind;
};

struct StructuralReport {
  std::string scheme;
  std::size_t items = 0;
  std::size_t isomorphism_classes = 0;
  std::size_t code_classes = 0;
  std::size_t violations = 0;
  std::vector<StructuralViolation> examples;
};

// Checks, over every pair of corpus items, that structural codes are equal
// exactly when the (sub)graphs are set-isomorphic. With `hop`, both sides use
// the h-hop enclosing subgraphs.
StructuralReport verify_structural_link_repr(std::span<const LinkItem> corpus, const LabelingScheme& scheme,
                                             std::optional<std::size_t> hop = std::nullopt,
                                             std::size_t workers = 1, std::size_t max_examples = 16);

}  // namespace labtrick
