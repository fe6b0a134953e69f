#include "labtrick/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "labtrick/errors.hpp"
#include "labtrick/kernels.hpp"

namespace labtrick {

double Objective::loss(const Model& model) const {
  std::vector<std::size_t> all(size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  double total = 0.0;
  constexpr std::size_t kChunk = 256;
  for (std::size_t i = 0; i < all.size(); i += kChunk) {
    auto chunk = std::span<const std::size_t>(all).subspan(i, std::min(kChunk, all.size() - i));
    total += evaluate(model, chunk).loss;
  }
  return total / static_cast<double>(std::max<std::size_t>(1, size()));
}

LossAndGradients SubgraphObjective::evaluate(const Model& model, std::span<const std::size_t> indices) const {
  if (indices.empty()) throw InvalidArgument("empty batch");
  LossAndGradients out{0.0, zero_gradients(model)};
  for (std::size_t i : indices) {
    auto one = loss_and_gradients(model, std::span<const Example>(&examples_.at(i), 1));
    out.loss += one.loss;
    for (std::size_t b = 0; b < out.gradients.size(); ++b) {
      kernels::active().axpy(1.0, one.gradients[b].values().data(), out.gradients[b].values().data(),
                             out.gradients[b].size());
    }
  }
  return out;
}

WholeGraphObjective::WholeGraphObjective(Graph graph, std::vector<Edge> pairs, std::vector<double> targets)
    : graph_(std::move(graph)), labels_(NodeLabels::uniform(graph_.num_nodes(), 0)), pairs_(std::move(pairs)),
      targets_(std::move(targets)) {
  if (pairs_.size() != targets_.size()) throw DimensionError("one target per pair required");
}

LossAndGradients WholeGraphObjective::evaluate(const Model& model, std::span<const std::size_t> indices) const {
  if (indices.empty()) throw InvalidArgument("empty batch");
  Tape tape;
  Var h = encode(tape, model, graph_, labels_);
  Var total;
  bool first = true;
  for (std::size_t i : indices) {
    auto [u, v] = pairs_.at(i);
    Var logit = head(tape, model, readout(tape, model, h, graph_, TargetSet{u, v}, labels_));
    Var loss = tape.bce_with_logits(logit, targets_[i]);
    if (!std::isfinite(tape.scalar(loss))) throw NumericError(i, "non-finite loss");
    total = first ? loss : tape.add(total, loss);
    first = false;
  }
  LossAndGradients out{tape.scalar(total), zero_gradients(model)};
  tape.backward(total);
  tape.accumulate_parameter_grads(out.gradients);
  return out;
}

std::vector<double> score_pairs_whole_graph(const Model& model, const Graph& g, std::span<const Edge> pairs) {
  Tape tape;
  NodeLabels labels = NodeLabels::uniform(g.num_nodes(), 0);
  Var h = encode(tape, model, g, labels);
  std::vector<double> scores;
  scores.reserve(pairs.size());
  for (auto [u, v] : pairs) scores.push_back(tape.scalar(head(tape, model, readout(tape, model, h, g, TargetSet{u, v}, labels))));
  return scores;
}

namespace {

class Optimizer {
 public:
  Optimizer(const TrainConfig& config, const Model& model)
      : config_(config), first_(zero_gradients(model)), second_(zero_gradients(model)) {}

  void step(Model& model, const std::vector<DenseMatrix>& grads, double scale) {
    ++t_;
    auto& params = model.parameters();
    for (std::size_t b = 0; b < params.size(); ++b) {
      auto p = params[b].values();
      auto g = grads[b].values();
      auto m = first_[b].values();
      auto v = second_[b].values();
      if (config_.optimizer == OptimizerKind::momentum) {
        for (std::size_t i = 0; i < p.size(); ++i) {
          m[i] = config_.momentum * m[i] + g[i] * scale;
          p[i] -= config_.learning_rate * m[i];
        }
      } else {
        constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
        const double c1 = 1.0 - std::pow(beta1, static_cast<double>(t_));
        const double c2 = 1.0 - std::pow(beta2, static_cast<double>(t_));
        for (std::size_t i = 0; i < p.size(); ++i) {
          const double gi = g[i] * scale;
          m[i] = beta1 * m[i] + (1 - beta1) * gi;
          v[i] = beta2 * v[i] + (1 - beta2) * gi * gi;
          p[i] -= config_.learning_rate * (m[i] / c1) / (std::sqrt(v[i] / c2) + eps);
        }
      }
    }
  }

 private:
  const TrainConfig& config_;
  std::vector<DenseMatrix> first_;
  std::vector<DenseMatrix> second_;
  std::size_t t_ = 0;
};

}  // namespace

TrainResult train(const TrainConfig& config, Model initial, const Objective& objective, const Validator& validate) {
  if (objective.size() == 0) throw InvalidArgument("training set is empty");
  if (config.batch_size == 0) throw InvalidArgument("batch size must be at least 1");
  if (!(config.learning_rate > 0)) throw InvalidArgument("learning rate must be positive");

  TrainResult result;
  result.initial_loss = objective.loss(initial);
  Model model = std::move(initial);
  Optimizer opt(config, model);
  std::mt19937_64 rng(config.seed);
  std::vector<std::size_t> order(objective.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  bool have_best = false;
  result.model = model;
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t len = std::min(config.batch_size, order.size() - start);
      std::span<const std::size_t> batch(order.data() + start, len);
      LossAndGradients lg;
      try {
        lg = objective.evaluate(model, batch);
      } catch (const NumericError& e) {
        throw TrainingError(epoch, e.what());
      }
      epoch_loss += lg.loss;
      opt.step(model, lg.gradients, 1.0 / static_cast<double>(len));
    }
    for (const auto& p : model.parameters()) {
      if (!p.all_finite()) throw TrainingError(epoch, "parameters diverged");
    }
    epoch_loss /= static_cast<double>(order.size());
    if (!std::isfinite(epoch_loss)) throw TrainingError(epoch, "loss diverged");
    result.epoch_losses.push_back(epoch_loss);

    const double score = validate ? validate(model) : -epoch_loss;
    if (!have_best || score > result.best_score) {
      have_best = true;
      result.best_score = score;
      result.best_epoch = epoch;
      result.model = model;
    }
  }
  result.final_loss = objective.loss(model);
  if (config.epochs == 0) result.final_loss = result.initial_loss;
  return result;
}

}  // namespace labtrick
