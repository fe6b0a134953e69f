#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "labtrick/generators.hpp"
#include "labtrick/model.hpp"

namespace labtrick::testing {

// Enclosing subgraph of a random link in G(n, p), labeled with `scheme`.
inline LabeledGraph random_labeled(Rng& rng, std::size_t n, double p, const LabelingScheme& scheme,
                                   std::size_t hop = 1) {
  const Graph g = random_gnp(n, p, rng);
  std::uniform_int_distribution<NodeId> pick(0, static_cast<NodeId>(n - 1));
  NodeId u = pick(rng), v = pick(rng);
  while (v == u) v = pick(rng);
  return make_labeled(extract_enclosing_subgraph(g, TargetSet{u, v}, hop, {.remove_target_link = true}), scheme);
}

inline LabeledGraph permuted(const LabeledGraph& in, const Permutation& p) {
  return {apply_permutation(in.graph, p), in.targets.mapped(p), in.labels.permuted(p)};
}

inline std::size_t max_label(const std::vector<Example>& batch) {
  std::size_t top = 1;
  for (const auto& ex : batch) top = std::max<std::size_t>(top, ex.input.labels.max_finite_code());
  return top;
}

struct GradCheck {
  std::size_t checked = 0;
  std::size_t passed = 0;
  double pass_rate() const { return checked ? static_cast<double>(passed) / static_cast<double>(checked) : 0.0; }
};

// Central differences with step 1e-5 on `samples` random coordinates, taken
// after jittering the bias blocks.
// A coordinate passes when |a - f| <= 1e-4 * max(|a|, |f|, 1e-6).
inline GradCheck finite_difference_check(const Model& model, const std::vector<Example>& batch, std::size_t samples,
                                         std::uint64_t seed) {
  constexpr double kStep = 1e-5;
  constexpr double kTol = 1e-4;
  std::mt19937_64 rng(seed);
  // zero biases put dead hidden rows exactly on a ReLU kink
  Model probe = model;
  std::uniform_real_distribution<double> jitter(-0.1, 0.1);
  for (auto& block : probe.parameters()) {
    if (block.rows() == 1) {
      for (double& v : block.values()) v += jitter(rng);
    }
  }
  const auto analytic = loss_and_gradients(probe, batch).gradients;
  std::uniform_int_distribution<std::size_t> block(0, model.parameters().size() - 1);
  GradCheck out;
  for (std::size_t s = 0; s < samples; ++s) {
    const std::size_t b = block(rng);
    auto values = probe.parameters()[b].values();
    std::uniform_int_distribution<std::size_t> coord(0, values.size() - 1);
    const std::size_t i = coord(rng);
    const double saved = values[i];
    values[i] = saved + kStep;
    const double up = batch_loss(probe, batch);
    values[i] = saved - kStep;
    const double down = batch_loss(probe, batch);
    values[i] = saved;
    const double numeric = (up - down) / (2 * kStep);
    const double a = analytic[b].values()[i];
    const double scale = std::max({std::abs(a), std::abs(numeric), 1e-6});
    ++out.checked;
    if (std::abs(a - numeric) <= kTol * scale) ++out.passed;
  }
  return out;
}

}  // namespace labtrick::testing
