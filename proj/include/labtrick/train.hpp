#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "labtrick/metrics.hpp"
#include "labtrick/model.hpp"

namespace labtrick {

enum class OptimizerKind { momentum, adam };

struct TrainConfig {
  std::size_t epochs = 20;
  double learning_rate = 0.01;
  std::size_t batch_size = 32;
  OptimizerKind optimizer = OptimizerKind::momentum;
  double momentum = 0.9;
  std::uint64_t seed = 1;
};

// A training set the optimizer can draw index batches from.
class Objective {
 public:
  virtual ~Objective() = default;
  virtual std::size_t size() const = 0;
  // Summed loss and gradients over the examples at `indices`.
  virtual LossAndGradients evaluate(const Model& model, std::span<const std::size_t> indices) const = 0;
  virtual double loss(const Model& model) const;
};

// One labeled enclosing subgraph per example.
class SubgraphObjective final : public Objective {
 public:
  explicit SubgraphObjective(std::vector<Example> examples) : examples_(std::move(examples)) {}
  std::size_t size() const override { return examples_.size(); }
  LossAndGradients evaluate(const Model& model, std::span<const std::size_t> indices) const override;
  const std::vector<Example>& examples() const noexcept { return examples_; }

 private:
  std::vector<Example> examples_;
};

// Autoencoder-style objective: one forward pass over the whole graph, then a
// center readout per candidate pair.
class WholeGraphObjective final : public Objective {
 public:
  WholeGraphObjective(Graph graph, std::vector<Edge> pairs, std::vector<double> targets);
  std::size_t size() const override { return pairs_.size(); }
  LossAndGradients evaluate(const Model& model, std::span<const std::size_t> indices) const override;

 private:
  Graph graph_;
  NodeLabels labels_;
  std::vector<Edge> pairs_;
  std::vector<double> targets_;
};

// Scores every pair after a single whole-graph forward pass.
std::vector<double> score_pairs_whole_graph(const Model& model, const Graph& g, std::span<const Edge> pairs);

// Higher is better.
using Validator = std::function<double(const Model&)>;

struct TrainResult {
  Model model;
  double initial_loss = 0.0;
  // Mean per-example loss accumulated during each epoch.
  std::vector<double> epoch_losses;
  // Mean per-example loss of the final-epoch parameters.
  double final_loss = 0.0;
  std::size_t best_epoch = 0;
  double best_score = 0.0;
};

// Mini-batch training with a seeded shuffle. Returns the parameters of the
// epoch with the best validation score (negative training loss without a
// validator); ties keep the earlier epoch. Throws TrainingError naming the
// epoch when the loss diverges.
TrainResult train(const TrainConfig& config, Model initial, const Objective& objective,
                  const Validator& validate = {});

}  // namespace labtrick
