#include "labtrick/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "labtrick/errors.hpp"

namespace labtrick {

// ---------------------------------------------------------------------------
// Names

std::string to_string(LayerKind k) { return k == LayerKind::gcn ? "gcn" : "gin"; }

std::string to_string(ReadoutKind k) {
  switch (k) {
    case ReadoutKind::center_hadamard: return "center-hadamard";
    case ReadoutKind::center_concat: return "center-concat";
    case ReadoutKind::sum: return "sum";
    case ReadoutKind::sortpool: return "sortpool";
  }
  return "?";
}

std::string to_string(const ReadoutSpec& r) {
  return r.kind == ReadoutKind::sortpool ? "sortpool:" + std::to_string(r.k) : to_string(r.kind);
}

LayerKind parse_layer_kind(const std::string& s) {
  if (s == "gcn") return LayerKind::gcn;
  if (s == "gin") return LayerKind::gin;
  throw InvalidArgument("unknown layer kind '" + s + "'");
}

ReadoutSpec parse_readout(const std::string& s) {
  if (s == "center-hadamard") return {ReadoutKind::center_hadamard, 0};
  if (s == "center-concat") return {ReadoutKind::center_concat, 0};
  if (s == "sum") return {ReadoutKind::sum, 0};
  if (s.rfind("sortpool", 0) == 0) {
    std::size_t k = 10;
    if (s.size() > 8) {
      if (s[8] != ':') throw InvalidArgument("sortpool readout is written sortpool:K");
      try {
        k = std::stoul(s.substr(9));
      } catch (const std::exception&) {
        throw InvalidArgument("bad sortpool k in '" + s + "'");
      }
    }
    if (k == 0) throw InvalidArgument("sortpool k must be at least 1");
    return {ReadoutKind::sortpool, k};
  }
  throw InvalidArgument("unknown readout '" + s + "'");
}

// ---------------------------------------------------------------------------
// ModelSpec

ModelSpec ModelSpec::stack(std::size_t embedding_rows, std::size_t embed_dim, std::size_t feature_dim,
                           LayerKind kind, std::size_t num_layers, std::size_t hidden_dim, ReadoutSpec readout,
                           std::size_t head_hidden) {
  ModelSpec spec;
  spec.embedding_rows = embedding_rows;
  spec.embed_dim = embed_dim;
  spec.feature_dim = feature_dim;
  spec.readout = readout;
  spec.head_hidden = head_hidden;
  std::size_t in = embed_dim + feature_dim;
  for (std::size_t l = 0; l < num_layers; ++l) {
    spec.layers.push_back({kind, in, hidden_dim, 0.0, Activation::relu});
    in = hidden_dim;
  }
  spec.check();
  return spec;
}

std::size_t ModelSpec::output_dim() const { return layers.empty() ? input_dim() : layers.back().out_dim; }

std::size_t ModelSpec::readout_dim() const {
  switch (readout.kind) {
    case ReadoutKind::center_hadamard:
    case ReadoutKind::sum: return output_dim();
    case ReadoutKind::center_concat: return 2 * output_dim();
    case ReadoutKind::sortpool: return readout.k * output_dim();
  }
  return 0;
}

void ModelSpec::check() const {
  if (embedding_rows == 0 || embed_dim == 0) throw InvalidArgument("embedding table must be non-empty");
  if (head_hidden == 0) throw InvalidArgument("head hidden width must be at least 1");
  if (layers.empty()) throw InvalidArgument("model needs at least one message-passing layer");
  if (readout.kind == ReadoutKind::sortpool && readout.k == 0) throw InvalidArgument("sortpool k must be >= 1");
  std::size_t in = input_dim();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    if (layers[l].in_dim == 0 || layers[l].out_dim == 0) throw InvalidArgument("layer dims must be >= 1");
    if (layers[l].in_dim != in) {
      throw DimensionError("layer " + std::to_string(l) + " expects " + std::to_string(layers[l].in_dim) +
                           " inputs, previous stage yields " + std::to_string(in));
    }
    in = layers[l].out_dim;
  }
}

std::vector<std::pair<std::size_t, std::size_t>> ModelSpec::parameter_shapes() const {
  std::vector<std::pair<std::size_t, std::size_t>> shapes{{embedding_rows, embed_dim}};
  for (const auto& l : layers) {
    shapes.emplace_back(l.in_dim, l.out_dim);
    shapes.emplace_back(1, l.out_dim);
    if (l.kind == LayerKind::gin) {
      shapes.emplace_back(l.out_dim, l.out_dim);
      shapes.emplace_back(1, l.out_dim);
    }
  }
  shapes.emplace_back(readout_dim(), head_hidden);
  shapes.emplace_back(1, head_hidden);
  shapes.emplace_back(head_hidden, 1);
  shapes.emplace_back(1, 1);
  return shapes;
}

// ---------------------------------------------------------------------------
// Model

Model::Model(ModelSpec spec, std::vector<DenseMatrix> parameters)
    : spec_(std::move(spec)), params_(std::move(parameters)) {
  spec_.check();
  auto shapes = spec_.parameter_shapes();
  if (shapes.size() != params_.size()) throw DimensionError("parameter block count does not match model spec");
  for (std::size_t i = 0; i < shapes.size(); ++i) {
    if (params_[i].rows() != shapes[i].first || params_[i].cols() != shapes[i].second) {
      throw DimensionError("parameter block " + std::to_string(i) + " has the wrong shape");
    }
  }
  index_blocks();
}

void Model::index_blocks() {
  layer_offsets_.clear();
  std::size_t idx = 1;
  for (const auto& l : spec_.layers) {
    layer_offsets_.push_back(idx);
    idx += l.kind == LayerKind::gin ? 4 : 2;
  }
  head_offset_ = idx;
}

Model Model::initialize(ModelSpec spec, std::uint64_t seed) {
  spec.check();
  std::vector<DenseMatrix> params;
  for (auto [rows, cols] : spec.parameter_shapes()) params.emplace_back(rows, cols);
  Model model(std::move(spec), std::move(params));

  std::vector<bool> is_bias(model.params_.size(), false);
  for (std::size_t l = 0; l < model.spec_.layers.size(); ++l) {
    const std::size_t b = model.layer_offsets_[l];
    is_bias[b + 1] = true;
    if (model.spec_.layers[l].kind == LayerKind::gin) is_bias[b + 3] = true;
  }
  is_bias[model.head_offset_ + 1] = is_bias[model.head_offset_ + 3] = true;

  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < model.params_.size(); ++i) {
    if (is_bias[i]) continue;
    DenseMatrix& m = model.params_[i];
    const double fan_in = i == 0 ? 1.0 : static_cast<double>(m.rows());
    const double bound = 1.0 / std::sqrt(fan_in);
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (double& v : m.values()) v = dist(rng);
  }
  return model;
}

std::size_t Model::num_scalars() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.size();
  return n;
}

LabeledGraph make_labeled(const Subgraph& sg, const LabelingScheme& scheme) {
  return {sg.graph, sg.targets, apply_labeling(scheme, sg)};
}

// ---------------------------------------------------------------------------
// Tape building blocks

Var build_input(Tape& tape, const Model& model, const Graph& g, const NodeLabels& labels) {
  const ModelSpec& spec = model.spec();
  if (labels.num_nodes() != g.num_nodes()) throw DimensionError("labels do not cover every node");
  Var table = tape.parameter(0, model.parameters()[0]);
  Var emb;
  const auto& codes = labels.values();
  if (std::find(codes.begin(), codes.end(), kUnreachableCode) == codes.end()) {
    emb = tape.embedding_sum(table, codes, labels.width());
  } else {
    // unreachable coordinates share the last table row
    std::vector<std::uint32_t> mapped(codes);
    const auto last = static_cast<std::uint32_t>(spec.embedding_rows - 1);
    for (auto& c : mapped) {
      if (c == kUnreachableCode) c = last;
    }
    emb = tape.embedding_sum(table, mapped, labels.width());
  }
  if (spec.feature_dim == 0) return emb;
  if (g.feature_dim() != spec.feature_dim) {
    throw DimensionError("model expects " + std::to_string(spec.feature_dim) + " node features, graph has " +
                         std::to_string(g.feature_dim()));
  }
  return tape.concat_cols(emb, tape.constant(g.features()));
}

Var layer_forward(Tape& tape, const Model& model, std::size_t layer, const Graph& g, Var h) {
  const LayerSpec& spec = model.spec().layers.at(layer);
  const auto& params = model.parameters();
  const std::size_t base = model.layer_block(layer);
  if (tape.value(h).rows() != g.num_nodes() || tape.value(h).cols() != spec.in_dim) {
    throw DimensionError("layer " + std::to_string(layer) + " input has the wrong shape");
  }
  Var out;
  if (spec.kind == LayerKind::gcn) {
    Var agg = tape.propagate(h, std::make_shared<const Propagation>(Propagation::gcn(g)));
    out = tape.add_bias(tape.matmul(agg, tape.parameter(base, params[base])),
                        tape.parameter(base + 1, params[base + 1]));
  } else {
    Var agg = tape.propagate(h, std::make_shared<const Propagation>(Propagation::gin(g, spec.gin_eps)));
    Var hidden = tape.relu(tape.add_bias(tape.matmul(agg, tape.parameter(base, params[base])),
                                         tape.parameter(base + 1, params[base + 1])));
    out = tape.add_bias(tape.matmul(hidden, tape.parameter(base + 2, params[base + 2])),
                        tape.parameter(base + 3, params[base + 3]));
  }
  return spec.activation == Activation::relu ? tape.relu(out) : out;
}

Var encode(Tape& tape, const Model& model, const Graph& g, const NodeLabels& labels) {
  Var h = build_input(tape, model, g, labels);
  for (std::size_t l = 0; l < model.spec().layers.size(); ++l) h = layer_forward(tape, model, l, g, h);
  return h;
}

std::vector<std::size_t> sortpool_rows(const DenseMatrix& h, const Graph& g, const NodeLabels& labels,
                                       std::size_t k) {
  if (h.rows() == 0) throw InvalidArgument("sortpool on an empty subgraph");
  std::vector<std::size_t> order(h.rows());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t last = h.cols() - 1;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (h(a, last) != h(b, last)) return h(a, last) > h(b, last);
    auto la = labels.at(a), lb = labels.at(b);
    if (!std::equal(la.begin(), la.end(), lb.begin(), lb.end())) {
      return std::lexicographical_compare(la.begin(), la.end(), lb.begin(), lb.end());
    }
    if (g.degree(static_cast<NodeId>(a)) != g.degree(static_cast<NodeId>(b))) {
      return g.degree(static_cast<NodeId>(a)) < g.degree(static_cast<NodeId>(b));
    }
    return a < b;
  });
  order.resize(k, kZeroRow);
  return order;
}

Var readout(Tape& tape, const Model& model, Var h, const Graph& g, const TargetSet& targets,
            const NodeLabels& labels) {
  const ReadoutSpec& spec = model.spec().readout;
  switch (spec.kind) {
    case ReadoutKind::center_hadamard:
    case ReadoutKind::center_concat: {
      if (targets.size() != 2) throw InvalidArgument("center readouts need exactly two targets");
      if (spec.kind == ReadoutKind::center_concat) {
        return tape.flatten(tape.gather_rows(h, {targets[0], targets[1]}));
      }
      return tape.hadamard(tape.gather_rows(h, {targets[0]}), tape.gather_rows(h, {targets[1]}));
    }
    case ReadoutKind::sum:
      return tape.sum_rows(h);
    case ReadoutKind::sortpool:
      return tape.flatten(tape.gather_rows(h, sortpool_rows(tape.value(h), g, labels, spec.k)));
  }
  throw InvalidArgument("unknown readout");
}

Var head(Tape& tape, const Model& model, Var link_repr) {
  const auto& p = model.parameters();
  const std::size_t b = model.head_block();
  Var hidden = tape.relu(tape.add_bias(tape.matmul(link_repr, tape.parameter(b, p[b])), tape.parameter(b + 1, p[b + 1])));
  return tape.add_bias(tape.matmul(hidden, tape.parameter(b + 2, p[b + 2])), tape.parameter(b + 3, p[b + 3]));
}

// ---------------------------------------------------------------------------
// Pure helpers

DenseMatrix build_input(const Model& model, const Graph& g, const NodeLabels& labels) {
  Tape tape;
  return tape.value(build_input(tape, model, g, labels));
}

DenseMatrix layer_forward(const Model& model, std::size_t layer, const Graph& g, const DenseMatrix& h) {
  Tape tape;
  return tape.value(layer_forward(tape, model, layer, g, tape.constant(h)));
}

double readout_and_score(const Model& model, const LabeledGraph& input, const DenseMatrix& h_final) {
  Tape tape;
  Var h = tape.constant(h_final);
  return tape.scalar(head(tape, model, readout(tape, model, h, input.graph, input.targets, input.labels)));
}

double score(const Model& model, const LabeledGraph& input) {
  Tape tape;
  Var h = encode(tape, model, input.graph, input.labels);
  return tape.scalar(head(tape, model, readout(tape, model, h, input.graph, input.targets, input.labels)));
}

std::vector<DenseMatrix> zero_gradients(const Model& model) {
  std::vector<DenseMatrix> out;
  for (const auto& p : model.parameters()) out.emplace_back(p.rows(), p.cols());
  return out;
}

LossAndGradients loss_and_gradients(const Model& model, std::span<const Example> batch) {
  if (batch.empty()) throw InvalidArgument("empty batch");
  LossAndGradients result{0.0, zero_gradients(model)};
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const Example& ex = batch[i];
    Tape tape;
    Var h = encode(tape, model, ex.input.graph, ex.input.labels);
    Var logit = head(tape, model, readout(tape, model, h, ex.input.graph, ex.input.targets, ex.input.labels));
    Var loss = tape.bce_with_logits(logit, ex.target);
    const double value = tape.scalar(loss);
    if (!std::isfinite(value)) throw NumericError(i, "non-finite loss");
    result.loss += value;
    tape.backward(loss);
    tape.accumulate_parameter_grads(result.gradients);
  }
  return result;
}

double batch_loss(const Model& model, std::span<const Example> batch) {
  double total = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const Example& ex = batch[i];
    Tape tape;
    Var h = encode(tape, model, ex.input.graph, ex.input.labels);
    Var logit = head(tape, model, readout(tape, model, h, ex.input.graph, ex.input.targets, ex.input.labels));
    const double value = tape.scalar(tape.bce_with_logits(logit, ex.target));
    if (!std::isfinite(value)) throw NumericError(i, "non-finite loss");
    total += value;
  }
  return total;
}

}  // namespace labtrick
