#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "labtrick/graph.hpp"
#include "labtrick/labeling.hpp"
#include "labtrick/metrics.hpp"
#include "labtrick/model.hpp"
#include "labtrick/train.hpp"

namespace labtrick {

enum class Mode { gae, seal };

struct MetricSpec {
  enum class Kind { hits, mrr };
  Kind kind = Kind::hits;
  // K for hits, negatives per source for mrr.
  std::size_t value = 20;

  // "hits:K" or "mrr:N".
  static MetricSpec parse(const std::string& s);
  std::string to_string() const;
  friend bool operator==(const MetricSpec&, const MetricSpec&) = default;
};

struct ExperimentConfig {
  Mode mode = Mode::seal;
  std::optional<LabelingScheme> scheme = LabelingScheme::drnl();
  std::size_t hops = 1;
  std::size_t layers = 3;
  LayerKind layer_kind = LayerKind::gcn;
  std::size_t hidden_dim = 32;
  std::size_t embed_dim = 16;
  ReadoutSpec readout;
  std::size_t epochs = 20;
  double learning_rate = 0.01;
  std::size_t batch_size = 32;
  std::size_t neg_per_pos = 1;
  // Fraction of training positives used as supervision.
  double train_fraction = 1.0;
  MetricSpec metric;
  std::uint64_t seed = 1;
  std::size_t workers = 1;
  OptimizerKind optimizer = OptimizerKind::momentum;

  // Missing keys keep their defaults; unknown keys and ill-typed values throw
  // ConfigError.
  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig from_file(const std::filesystem::path& path);
  nlohmann::json to_json() const;
  // Throws ConfigError on contradictions (gae with a scheme, seal without one,
  // non-center readout in gae, l = 0, ...).
  void check() const;
  TrainConfig train_config() const;
};

// Internal graph plus a train/valid/test split, all edges in internal ids.
struct Dataset {
  // All positive edges; used to reject negatives.
  Graph full;
  std::vector<std::uint64_t> original_ids;
  IngestReport ingest;
  EdgeSplit split;

  // Message-passing graph: train positives only.
  Graph train_graph() const;
};

Dataset make_dataset(EdgeListGraph parsed, SplitRatios ratios, std::size_t neg_per_pos, std::uint64_t seed);

// Split directory: nodes.txt (original ids, one per line, internal order),
// train.edges, valid.edges, test.edges, valid.neg, test.neg (original ids),
// optional features.csv (row i = internal node i).
void write_split_dir(const std::filesystem::path& dir, const Dataset& data);
Dataset read_split_dir(const std::filesystem::path& dir);

// Candidates for one evaluation split. For hits, `negatives` is the split's
// negative pool. For mrr, positive i owns negatives [i*N, (i+1)*N), all
// sharing its source node.
struct EvalSet {
  std::vector<Edge> positives;
  std::vector<Edge> negatives;
};

// mrr: for each positive (u, v), N distinct x != u with (u, x) not an edge of
// `full`, drawn with `seed`.
EvalSet make_eval_set(const MetricSpec& metric, const Graph& full, std::span<const Edge> positives,
                      std::span<const Edge> split_negatives, std::uint64_t seed);

double evaluate_metric(const MetricSpec& metric, std::span<const double> pos_scores,
                       std::span<const double> neg_scores);

// seal: labeled enclosing subgraph of one link, target edge removed.
LabeledGraph prepare_link(const ExperimentConfig& config, const Graph& mp_graph, Edge link);

// seal: per-link extraction and labeling on `mp_graph`, scored in parallel;
// gae: one whole-graph forward.
std::vector<double> score_links(const ExperimentConfig& config, const Model& model, const Graph& mp_graph,
                                std::span<const Edge> links);

struct ExperimentResult {
  Model model;
  nlohmann::json report;
};

// Trains on the train split, keeps the epoch with the best validation metric
// and reports valid/test metrics. Module errors surface as StageError.
ExperimentResult run_experiment(const ExperimentConfig& config, const Dataset& data);

// Valid/test metric of an already trained model.
nlohmann::json evaluate_model(const ExperimentConfig& config, const Model& model, const Dataset& data);

}  // namespace labtrick
