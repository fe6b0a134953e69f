#include "labtrick/labeling.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "labtrick/errors.hpp"

namespace labtrick {

// ---------------------------------------------------------------------------
// Scheme

void LabelingScheme::check() const {
  if (d_max && *d_max == 0) throw InvalidArgument("d_max must be at least 1");
  if (d_max && !pair_valued()) throw InvalidArgument(name() + " does not take a distance cap");
}

std::string LabelingScheme::name() const {
  switch (kind) {
    case SchemeKind::zero_one: return "zero-one";
    case SchemeKind::drnl: return "drnl";
    case SchemeKind::de: return "de";
    case SchemeKind::de_plus: return "de+";
    case SchemeKind::all_one: return "all-one";
  }
  return "?";
}

LabelingScheme parse_scheme(const std::string& name, std::optional<Distance> d_max) {
  LabelingScheme s;
  if (name == "zo" || name == "zero-one") {
    s = LabelingScheme::zero_one();
  } else if (name == "drnl") {
    s = LabelingScheme::drnl();
  } else if (name == "de") {
    s = LabelingScheme::de(d_max.value_or(3));
  } else if (name == "de+" || name == "de-plus") {
    s = LabelingScheme::de_plus(d_max);
  } else if (name == "all-one") {
    s = LabelingScheme::all_one();
  } else {
    throw InvalidArgument("unknown labeling scheme '" + name + "'");
  }
  if (d_max && !s.pair_valued()) throw InvalidArgument("--dmax only applies to de and de+");
  s.check();
  return s;
}

// ---------------------------------------------------------------------------
// NodeLabels

NodeLabels::NodeLabels(std::size_t width, std::vector<std::uint32_t> values)
    : width_(width), values_(std::move(values)) {
  if (width_ != 1 && width_ != 2) throw InvalidArgument("label width must be 1 or 2");
  if (values_.size() % width_ != 0) throw DimensionError("label values not a multiple of width");
}

NodeLabels NodeLabels::uniform(std::size_t num_nodes, std::uint32_t value) {
  return NodeLabels(1, std::vector<std::uint32_t>(num_nodes, value));
}

std::vector<Color> NodeLabels::as_colors() const {
  std::vector<Color> out(num_nodes());
  for (std::size_t i = 0; i < out.size(); ++i) {
    auto l = at(i);
    out[i] = width_ == 1 ? Color{l[0]} : (Color{std::min(l[0], l[1])} << 32) | std::max(l[0], l[1]);
  }
  return out;
}

std::uint32_t NodeLabels::max_finite_code() const {
  std::uint32_t best = 0;
  for (auto v : values_) {
    if (v != kUnreachableCode) best = std::max(best, v);
  }
  return best;
}

NodeLabels NodeLabels::permuted(const Permutation& p) const {
  if (p.size() != num_nodes()) throw DimensionError("permutation length does not match labels");
  std::vector<std::uint32_t> out(values_.size());
  for (std::size_t i = 0; i < num_nodes(); ++i) {
    auto src = at(i);
    std::copy(src.begin(), src.end(), out.begin() + p(static_cast<NodeId>(i)) * width_);
  }
  return NodeLabels(width_, std::move(out));
}

std::string NodeLabels::format(std::size_t node) const {
  std::string out;
  for (std::size_t k = 0; k < width_; ++k) {
    if (k) out += ',';
    auto v = at(node)[k];
    out += v == kUnreachableCode ? std::string("inf") : std::to_string(v);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Labeling

std::uint32_t drnl_hash(Distance dx, Distance dy) {
  if (dx == 0 || dy == 0 || dx == kInfDistance || dy == kInfDistance) {
    throw InvalidArgument("drnl_hash needs finite distances >= 1");
  }
  const std::uint64_t d = std::uint64_t{dx} + dy;
  const std::uint64_t half = d / 2;
  const std::uint64_t label = 1 + std::min(dx, dy) + half * (half + d % 2 - 1);
  if (label >= kUnreachableCode) throw RangeError("drnl label overflows 32 bits");
  return static_cast<std::uint32_t>(label);
}

namespace {

std::uint32_t capped(Distance d, std::optional<Distance> d_max) {
  if (d_max) return d == kInfDistance ? *d_max + 1 : std::min(d, *d_max);
  return d == kInfDistance ? kUnreachableCode : d;
}

}  // namespace

NodeLabels apply_labeling(const LabelingScheme& scheme, const Subgraph& sg) {
  scheme.check();
  const std::size_t n = sg.num_nodes();
  const TargetSet& s = sg.targets;
  const bool needs_pair = scheme.kind == SchemeKind::drnl || scheme.pair_valued();
  if (needs_pair && s.size() != 2) {
    throw InvalidArgument(scheme.name() + " labeling needs exactly two targets, got " + std::to_string(s.size()));
  }
  if (needs_pair && sg.dist_to_target.size() != 2) throw InvalidArgument("subgraph lacks target distances");

  switch (scheme.kind) {
    case SchemeKind::zero_one: {
      std::vector<std::uint32_t> v(n, 0);
      for (NodeId t : s.nodes()) v[t] = 1;
      return NodeLabels(1, std::move(v));
    }
    case SchemeKind::all_one:
      return NodeLabels::uniform(n, 1);
    case SchemeKind::drnl: {
      std::vector<std::uint32_t> v(n, 0);
      const auto& dx = sg.dist_to_target[0];
      const auto& dy = sg.dist_to_target[1];
      for (NodeId i = 0; i < n; ++i) {
        if (s.contains(i)) {
          v[i] = 1;
        } else if (dx[i] != kInfDistance && dy[i] != kInfDistance) {
          v[i] = drnl_hash(dx[i], dy[i]);
        }
      }
      return NodeLabels(1, std::move(v));
    }
    case SchemeKind::de: {
      // Plain shortest paths inside the subgraph, no masking.
      auto dx = bfs_distances(sg.graph, s[0]);
      auto dy = bfs_distances(sg.graph, s[1]);
      std::vector<std::uint32_t> v(2 * n);
      for (std::size_t i = 0; i < n; ++i) {
        v[2 * i] = capped(dx[i], scheme.d_max);
        v[2 * i + 1] = capped(dy[i], scheme.d_max);
      }
      return NodeLabels(2, std::move(v));
    }
    case SchemeKind::de_plus: {
      const auto& dx = sg.dist_to_target[0];
      const auto& dy = sg.dist_to_target[1];
      std::vector<std::uint32_t> v(2 * n);
      for (std::size_t i = 0; i < n; ++i) {
        if (s.contains(static_cast<NodeId>(i))) {
          // A target's distance to the other target is undefined once masked.
          v[2 * i] = v[2 * i + 1] = 0;
          continue;
        }
        v[2 * i] = capped(dx[i], scheme.d_max);
        v[2 * i + 1] = capped(dy[i], scheme.d_max);
      }
      return NodeLabels(2, std::move(v));
    }
  }
  throw InvalidArgument("unknown scheme");
}

NodeLabels label_graph(const LabelingScheme& scheme, const Graph& g, const TargetSet& targets) {
  return apply_labeling(scheme, whole_graph_view(g, targets));
}

// ---------------------------------------------------------------------------
// Validity checks

namespace {

std::string describe(const LinkItem& item) {
  std::ostringstream os;
  os << "n=" << item.graph.num_nodes() << " edges={";
  bool first = true;
  for (auto [u, v] : item.graph.edges()) {
    os << (first ? "" : ",") << u << '-' << v;
    first = false;
  }
  os << "} S={";
  for (std::size_t i = 0; i < item.targets.size(); ++i) os << (i ? "," : "") << item.targets[i];
  os << '}';
  return os.str();
}

}  // namespace

ValidityReport validate_labeling_scheme(const LabelingScheme& scheme, std::span<const LinkItem> corpus,
                                        std::size_t trials, std::uint64_t seed,
                                        std::size_t max_counterexamples) {
  ValidityReport report;
  report.scheme = scheme.name();
  report.items = corpus.size();
  Rng rng(seed);

  auto record = [&](std::size_t item, std::size_t other, const char* condition, std::string detail) {
    if (report.counterexamples.size() < max_counterexamples) {
      report.counterexamples.push_back({item, other, condition, std::move(detail)});
    }
  };

  static const TargetSet kNoTargets;
  std::vector<NodeLabels> labels;
  std::vector<std::vector<Color>> colors;
  labels.reserve(corpus.size());
  colors.reserve(corpus.size());

  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const LinkItem& item = corpus[i];
    labels.push_back(label_graph(scheme, item.graph, item.targets));
    colors.push_back(labels.back().as_colors());
    const NodeLabels& lab = labels.back();

    // Surrogate for condition 1: target and non-target label sets disjoint.
    std::set<Color> target_labels, other_labels;
    for (NodeId v = 0; v < item.graph.num_nodes(); ++v) {
      (item.targets.contains(v) ? target_labels : other_labels).insert(colors.back()[v]);
    }
    for (Color c : target_labels) {
      if (other_labels.count(c)) {
        ++report.disjointness_violations;
        record(i, i, "disjoint-labels", describe(item) + ": a target shares its label with a non-target");
        break;
      }
    }

    // Condition 2: relabel, recompute, compare with the relabeled labels.
    for (std::size_t t = 0; t < trials; ++t) {
      Permutation p = random_permutation(item.graph.num_nodes(), rng);
      ++report.permutation_trials;
      NodeLabels moved = label_graph(scheme, apply_permutation(item.graph, p), item.targets.mapped(p));
      if (moved != lab.permuted(p)) {
        ++report.equivariance_violations;
        record(i, i, "equivariance", describe(item) + ": labels are not permutation equivariant");
      }
    }

    // Condition 1 on automorphisms: every label-preserving automorphism must
    // fix the target set.
    ColoredView self{item.graph, kNoTargets, colors.back()};
    for_each_isomorphism(self, self, [&](const Permutation& p) {
      if (!item.targets.mapped(p).same_set(item.targets)) {
        ++report.target_mapping_violations;
        record(i, i, "target-mapping",
               describe(item) + ": a label-preserving automorphism moves the target set");
        return false;
      }
      return true;
    });
  }

  // Condition 1 across items: bucket labeled graphs (targets forgotten) by
  // canonical code and check one isomorphism per member against the bucket
  // representative. Together with the automorphism check above this covers
  // every label-preserving isomorphism between any two items.
  std::map<CanonicalCode, std::size_t> representative;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    auto code = canonical_code(corpus[i].graph, colors[i], kNoTargets);
    auto [it, inserted] = representative.emplace(std::move(code), i);
    if (inserted) continue;
    const std::size_t r = it->second;
    ColoredView a{corpus[r].graph, kNoTargets, colors[r]};
    ColoredView b{corpus[i].graph, kNoTargets, colors[i]};
    auto witness = are_isomorphic(a, b);
    if (!witness) continue;
    if (!corpus[i].targets.mapped(*witness).same_set(corpus[r].targets)) {
      ++report.target_mapping_violations;
      record(r, i, "target-mapping",
             describe(corpus[r]) + " vs " + describe(corpus[i]) +
                 ": labeled graphs are isomorphic but the isomorphism does not map targets to targets");
    }
  }
  return report;
}

}  // namespace labtrick
