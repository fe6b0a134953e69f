#include "labtrick/wl.hpp"

#include <algorithm>
#include <unordered_map>

#include "labtrick/errors.hpp"
#include "labtrick/parallel.hpp"

namespace labtrick {

std::size_t ColorTrace::num_classes(std::size_t round) const {
  const auto& c = rounds.at(round);
  return c.empty() ? 0 : *std::max_element(c.begin(), c.end()) + 1;
}

namespace {

std::vector<std::uint32_t> signature(const Graph& g, const std::vector<std::uint32_t>& prev, NodeId v) {
  std::vector<std::uint32_t> key;
  key.reserve(g.degree(v) + 1);
  key.push_back(prev[v]);
  for (NodeId u : g.neighbors(v)) key.push_back(prev[u]);
  std::sort(key.begin() + 1, key.end());
  return key;
}

}  // namespace

ColorTrace wl_refine(const Graph& g, std::span<const Color> init_colors, std::size_t max_rounds) {
  const std::size_t n = g.num_nodes();
  if (init_colors.size() != n) throw DimensionError("initial colors must have one entry per node");

  ColorTrace trace;
  {
    std::unordered_map<Color, std::uint32_t> index;
    std::vector<std::uint32_t> round0(n);
    for (std::size_t v = 0; v < n; ++v) {
      round0[v] = index.try_emplace(init_colors[v], static_cast<std::uint32_t>(index.size())).first->second;
    }
    trace.rounds.push_back(std::move(round0));
  }
  if (trace.num_classes(0) == n) {
    trace.converged = true;
    return trace;
  }

  for (std::size_t t = 1; t <= max_rounds; ++t) {
    const auto& prev = trace.rounds.back();
    std::map<std::vector<std::uint32_t>, std::uint32_t> index;
    std::vector<std::uint32_t> next(n);
    for (NodeId v = 0; v < n; ++v) {
      next[v] = index.try_emplace(signature(g, prev, v), static_cast<std::uint32_t>(index.size())).first->second;
    }
    const std::size_t before = trace.num_classes(t - 1);
    trace.rounds.push_back(std::move(next));
    const std::size_t after = trace.num_classes(t);
    if (after == before || after == n) {
      trace.converged = true;
      trace.converged_at = t;
      return trace;
    }
  }
  trace.converged_at = trace.rounds.size() - 1;
  return trace;
}

// ---------------------------------------------------------------------------

std::uint32_t ColorTable::intern_initial(Color c) {
  return initial_.try_emplace(c, static_cast<std::uint32_t>(initial_.size())).first->second;
}

std::vector<std::uint32_t> ColorTable::refine(const Graph& g, std::span<const Color> init_colors,
                                              std::size_t rounds) {
  const std::size_t n = g.num_nodes();
  if (init_colors.size() != n) throw DimensionError("initial colors must have one entry per node");
  std::vector<std::uint32_t> colors(n);
  for (std::size_t v = 0; v < n; ++v) colors[v] = intern_initial(init_colors[v]);
  if (rounds_.size() < rounds) rounds_.resize(rounds);
  for (std::size_t t = 0; t < rounds; ++t) {
    auto& table = rounds_[t];
    std::vector<std::uint32_t> next(n);
    for (NodeId v = 0; v < n; ++v) {
      next[v] = table.try_emplace(signature(g, colors, v), static_cast<std::uint32_t>(table.size())).first->second;
    }
    colors = std::move(next);
  }
  return colors;
}

WlLinkCode wl_link_code(ColorTable& table, const Graph& g, const TargetSet& targets,
                        const std::optional<LabelingScheme>& scheme, std::size_t rounds,
                        std::optional<std::size_t> hop) {
  if (rounds == 0) throw InvalidArgument("wl_link_code needs at least one round");
  Subgraph sg = hop ? extract_enclosing_subgraph(g, targets, *hop) : whole_graph_view(g, targets);
  std::vector<Color> init = scheme ? apply_labeling(*scheme, sg).as_colors() : std::vector<Color>(sg.num_nodes(), 0);
  auto colors = table.refine(sg.graph, init, rounds);

  WlLinkCode code;
  std::vector<std::uint64_t> target_colors;
  for (NodeId t : sg.targets.nodes()) target_colors.push_back(colors[t]);
  std::sort(target_colors.begin(), target_colors.end());
  code.words.push_back(target_colors.size());
  code.words.insert(code.words.end(), target_colors.begin(), target_colors.end());

  std::map<std::uint32_t, std::uint64_t> histogram;
  for (auto c : colors) ++histogram[c];
  code.words.push_back(histogram.size());
  for (auto [c, count] : histogram) {
    code.words.push_back(c);
    code.words.push_back(count);
  }
  return code;
}

// ---------------------------------------------------------------------------

PairCheck check_indistinguishable_pair(const Graph& g, std::size_t rounds, const IndistinguishablePair& pair) {
  PairCheck check;
  ColorTable plain;
  auto colors = plain.refine(g, std::vector<Color>(g.num_nodes(), 0), rounds);
  check.same_color = pair.u != pair.v && colors[pair.u] == colors[pair.v];
  check.w_adjacent_u_only = pair.w != pair.u && pair.w != pair.v && g.has_edge(pair.u, pair.w) &&
                            !g.has_edge(pair.v, pair.w);
  ColorTable labeled;
  const auto scheme = LabelingScheme::zero_one();
  auto a = wl_link_code(labeled, g, TargetSet{pair.u, pair.w}, scheme, rounds);
  auto b = wl_link_code(labeled, g, TargetSet{pair.v, pair.w}, scheme, rounds);
  check.labeled_codes_differ = a != b;
  return check;
}

std::vector<IndistinguishablePair> find_indistinguishable_link_pairs(const Graph& g, std::size_t rounds,
                                                                      std::size_t max_pairs) {
  if (rounds == 0) throw InvalidArgument("need at least one round");
  const std::size_t n = g.num_nodes();
  ColorTable plain;
  auto colors = plain.refine(g, std::vector<Color>(n, 0), rounds);

  // All zero-one labeled link codes come from one table so they compare.
  ColorTable labeled;
  const auto scheme = LabelingScheme::zero_one();
  std::map<std::pair<NodeId, NodeId>, WlLinkCode> cache;
  auto code_of = [&](NodeId a, NodeId b) -> const WlLinkCode& {
    auto key = std::make_pair(a, b);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, wl_link_code(labeled, g, TargetSet{a, b}, scheme, rounds)).first;
    return it->second;
  };

  std::vector<IndistinguishablePair> out;
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = 0; v < n; ++v) {
      if (u == v || colors[u] != colors[v]) continue;
      for (NodeId w : g.neighbors(u)) {
        if (w == v || g.has_edge(v, w)) continue;
        if (code_of(u, w) == code_of(v, w)) continue;
        out.push_back({u, v, w});
        if (out.size() >= max_pairs) return out;
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

StructuralLinkCode structural_link_code(const Graph& g, const NodeLabels& labels, const TargetSet& targets) {
  auto colors = labels.as_colors();
  StructuralLinkCode out;
  for (NodeId t : targets.nodes()) out.push_back(canonical_code(g, colors, TargetSet{t}));
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

struct PreparedItem {
  Graph graph;
  TargetSet targets;
  StructuralLinkCode code;
  std::vector<std::uint64_t> invariant;
};

std::vector<std::uint64_t> cheap_invariant(const Graph& g, const TargetSet& s) {
  std::vector<std::uint64_t> inv{g.num_nodes(), g.num_edges(), s.size()};
  std::vector<std::uint64_t> degrees, target_degrees;
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    (s.contains(v) ? target_degrees : degrees).push_back(g.degree(v));
  }
  std::sort(degrees.begin(), degrees.end());
  std::sort(target_degrees.begin(), target_degrees.end());
  inv.insert(inv.end(), degrees.begin(), degrees.end());
  inv.push_back(~std::uint64_t{0});
  inv.insert(inv.end(), target_degrees.begin(), target_degrees.end());
  inv.push_back(s.size() == 2 && g.has_edge(s[0], s[1]));
  return inv;
}

}  // namespace

StructuralReport verify_structural_link_repr(std::span<const LinkItem> corpus, const LabelingScheme& scheme,
                                             std::optional<std::size_t> hop, std::size_t workers,
                                             std::size_t max_examples) {
  StructuralReport report;
  report.scheme = scheme.name();
  report.items = corpus.size();

  std::vector<PreparedItem> items(corpus.size());
  parallel_for(corpus.size(), workers, [&](std::size_t i) {
    const LinkItem& it = corpus[i];
    Subgraph sg = hop ? extract_enclosing_subgraph(it.graph, it.targets, *hop) : whole_graph_view(it.graph, it.targets);
    NodeLabels labels = apply_labeling(scheme, sg);
    items[i].code = structural_link_code(sg.graph, labels, sg.targets);
    items[i].invariant = cheap_invariant(sg.graph, sg.targets);
    items[i].graph = std::move(sg.graph);
    items[i].targets = std::move(sg.targets);
  });

  // Ground truth: set-isomorphism classes found with the oracle. Items join
  // the first class whose representative they are isomorphic to.
  std::map<std::vector<std::uint64_t>, std::vector<std::size_t>> reps_by_invariant;
  std::vector<std::size_t> class_of(items.size());
  std::vector<std::size_t> class_rep;
  for (std::size_t i = 0; i < items.size(); ++i) {
    auto& reps = reps_by_invariant[items[i].invariant];
    bool placed = false;
    for (std::size_t c : reps) {
      const auto& r = items[class_rep[c]];
      if (are_isomorphic(r.graph, r.targets, items[i].graph, items[i].targets)) {
        class_of[i] = c;
        placed = true;
        break;
      }
    }
    if (!placed) {
      class_of[i] = class_rep.size();
      reps.push_back(class_rep.size());
      class_rep.push_back(i);
    }
  }
  report.isomorphism_classes = class_rep.size();

  // The two partitions must coincide.
  std::map<StructuralLinkCode, std::map<std::size_t, std::size_t>> classes_by_code;
  std::vector<std::map<StructuralLinkCode, std::size_t>> codes_by_class(class_rep.size());
  for (std::size_t i = 0; i < items.size(); ++i) {
    auto [it, _] = classes_by_code.try_emplace(items[i].code);
    it->second.try_emplace(class_of[i], i);
    codes_by_class[class_of[i]].try_emplace(it->first, i);
  }
  report.code_classes = classes_by_code.size();

  auto note = [&](std::size_t a, std::size_t b, const char* kind) {
    ++report.violations;
    if (report.examples.size() < max_examples) report.examples.push_back({a, b, kind});
  };
  for (const auto& [code, classes] : classes_by_code) {
    auto first = classes.begin();
    for (auto it = std::next(first); it != classes.end(); ++it) note(first->second, it->second, "equal-code-not-isomorphic");
  }
  for (const auto& codes : codes_by_class) {
    if (codes.size() < 2) continue;
    auto first = codes.begin();
    for (auto it = std::next(first); it != codes.end(); ++it) note(first->second, it->second, "isomorphic-code-differs");
  }
  return report;
}

}  // namespace labtrick
