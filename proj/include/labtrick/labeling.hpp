#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "labtrick/generators.hpp"
#include "labtrick/graph.hpp"
#include "labtrick/isomorphism.hpp"

namespace labtrick {

enum class SchemeKind { zero_one, drnl, de, de_plus, all_one };

struct LabelingScheme {
  SchemeKind kind = SchemeKind::zero_one;
  // Distance cap; only meaningful for de and de_plus.
  std::optional<Distance> d_max;

  static LabelingScheme zero_one() { return {SchemeKind::zero_one, std::nullopt}; }
  static LabelingScheme drnl() { return {SchemeKind::drnl, std::nullopt}; }
  static LabelingScheme de(Distance d_max = 3) { return {SchemeKind::de, d_max}; }
  static LabelingScheme de_plus(std::optional<Distance> d_max = std::nullopt) {
    return {SchemeKind::de_plus, d_max};
  }
  // Control scheme: labels every node 1, which does not mark the targets.
  static LabelingScheme all_one() { return {SchemeKind::all_one, std::nullopt}; }

  bool pair_valued() const noexcept { return kind == SchemeKind::de || kind == SchemeKind::de_plus; }
  bool valid_by_design() const noexcept { return kind != SchemeKind::all_one; }
  // Throws InvalidArgument on d_max == 0 or a cap on a scheme without one.
  void check() const;
  std::string name() const;

  friend bool operator==(const LabelingScheme&, const LabelingScheme&) = default;
};

// Accepts zo, zero-one, drnl, de, de+, de-plus, all-one.
LabelingScheme parse_scheme(const std::string& name, std::optional<Distance> d_max = std::nullopt);

// Code for an unreachable coordinate in uncapped DE+ labels. Capped DE and
// DE+ use d_max + 1 instead.
inline constexpr std::uint32_t kUnreachableCode = 0xFFFFFFFFu;

// Per-node labels, either scalar (width 1) or distance pairs (width 2).
class NodeLabels {
 public:
  NodeLabels() = default;
  NodeLabels(std::size_t width, std::vector<std::uint32_t> values);
  static NodeLabels uniform(std::size_t num_nodes, std::uint32_t value = 0);

  std::size_t width() const noexcept { return width_; }
  std::size_t num_nodes() const noexcept { return width_ == 0 ? 0 : values_.size() / width_; }
  std::span<const std::uint32_t> at(std::size_t node) const {
    return {values_.data() + node * width_, width_};
  }
  const std::vector<std::uint32_t>& values() const noexcept { return values_; }

  // Injective map of each label to a discrete color. Pairs are unordered.
  std::vector<Color> as_colors() const;
  // Largest code other than kUnreachableCode; 0 when empty.
  std::uint32_t max_finite_code() const;
  // result.at(p(i)) == at(i).
  NodeLabels permuted(const Permutation& p) const;
  // "3", "1,2", "inf" for kUnreachableCode coordinates.
  std::string format(std::size_t node) const;

  friend bool operator==(const NodeLabels&, const NodeLabels&) = default;

 private:
  std::size_t width_ = 1;
  std::vector<std::uint32_t> values_;
};

// Double-radius hash of the (masked) distances to the two targets:
// 1 + min(dx, dy) + (d/2) * ((d/2) + (d%2) - 1), d = dx + dy.
// Throws InvalidArgument for a zero or infinite distance.
std::uint32_t drnl_hash(Distance dx, Distance dy);

// Labels the nodes of `sg` (local ids). drnl, de and de_plus require two
// targets.
NodeLabels apply_labeling(const LabelingScheme& scheme, const Subgraph& sg);

// Labels on the full graph with identity ids.
NodeLabels label_graph(const LabelingScheme& scheme, const Graph& g, const TargetSet& targets);

struct ValidityCounterexample {
  std::size_t item = 0;
  std::size_t other = 0;
  std::string condition;
  std::string detail;
};

struct ValidityReport {
  std::string scheme;
  std::size_t items = 0;
  std::size_t permutation_trials = 0;
  // Condition 2: labels computed on (pi(g), pi(S)) differ from pi(labels).
  std::size_t equivariance_violations = 0;
  // Condition 1 surrogate: a target shares its label with a non-target.
  std::size_t disjointness_violations = 0;
  // Condition 1 witness search: a label-preserving isomorphism that does not
  // map one target set onto the other.
  std::size_t target_mapping_violations = 0;
  std::vector<ValidityCounterexample> counterexamples;

  bool condition1_holds() const noexcept { return target_mapping_violations == 0; }
  bool condition2_holds() const noexcept { return equivariance_violations == 0; }
  bool valid() const noexcept {
    return condition1_holds() && condition2_holds() && disjointness_violations == 0;
  }
};

// Failures are recorded in the report; at most `max_counterexamples` are
// kept verbatim.
ValidityReport validate_labeling_scheme(const LabelingScheme& scheme, std::span<const LinkItem> corpus,
                                        std::size_t trials, std::uint64_t seed,
                                        std::size_t max_counterexamples = 16);

}  // namespace labtrick
