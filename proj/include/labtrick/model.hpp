#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "labtrick/autograd.hpp"
#include "labtrick/graph.hpp"
#include "labtrick/labeling.hpp"
#include "labtrick/matrix.hpp"

namespace labtrick {

enum class LayerKind : std::uint8_t { gcn = 0, gin = 1 };
enum class Activation : std::uint8_t { relu = 0, identity = 1 };
enum class ReadoutKind : std::uint8_t { center_hadamard = 0, center_concat = 1, sum = 2, sortpool = 3 };

struct LayerSpec {
  LayerKind kind = LayerKind::gcn;
  std::size_t in_dim = 0;
  std::size_t out_dim = 0;
  double gin_eps = 0.0;
  Activation activation = Activation::relu;

  friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

struct ReadoutSpec {
  ReadoutKind kind = ReadoutKind::center_hadamard;
  // Rows kept by sortpool.
  std::size_t k = 0;

  friend bool operator==(const ReadoutSpec&, const ReadoutSpec&) = default;
};

std::string to_string(LayerKind k);
std::string to_string(ReadoutKind k);
LayerKind parse_layer_kind(const std::string& s);
// center-hadamard, center-concat, sum, sortpool:K
ReadoutSpec parse_readout(const std::string& s);
std::string to_string(const ReadoutSpec& r);

struct ModelSpec {
  // Rows of the label embedding table (largest usable label + 1).
  std::size_t embedding_rows = 2;
  std::size_t embed_dim = 8;
  std::size_t feature_dim = 0;
  std::vector<LayerSpec> layers;
  ReadoutSpec readout;
  std::size_t head_hidden = 32;

  // A chain of `num_layers` equal-width layers fed by embedding ⧺ features.
  static ModelSpec stack(std::size_t embedding_rows, std::size_t embed_dim, std::size_t feature_dim,
                         LayerKind kind, std::size_t num_layers, std::size_t hidden_dim, ReadoutSpec readout,
                         std::size_t head_hidden);

  std::size_t input_dim() const noexcept { return embed_dim + feature_dim; }
  std::size_t output_dim() const;
  std::size_t readout_dim() const;
  // Throws DimensionError / InvalidArgument when dims do not chain.
  void check() const;
  // Shapes of the parameter blocks in declaration order.
  std::vector<std::pair<std::size_t, std::size_t>> parameter_shapes() const;

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

// Parameter blocks, in order: label embedding; per layer W, b (gcn) or
// W1, b1, W2, b2 (gin); head W1, b1, W2, b2.
class Model {
 public:
  Model() = default;
  Model(ModelSpec spec, std::vector<DenseMatrix> parameters);

  // Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights, zero biases; the
  // embedding table uses fan_in = 1.
  static Model initialize(ModelSpec spec, std::uint64_t seed);

  const ModelSpec& spec() const noexcept { return spec_; }
  const std::vector<DenseMatrix>& parameters() const noexcept { return params_; }
  std::vector<DenseMatrix>& parameters() noexcept { return params_; }
  std::size_t num_scalars() const;

  std::size_t layer_block(std::size_t layer) const { return layer_offsets_.at(layer); }
  std::size_t head_block() const noexcept { return head_offset_; }

  friend bool operator==(const Model& a, const Model& b) { return a.spec_ == b.spec_ && a.params_ == b.params_; }

 private:
  void index_blocks();

  ModelSpec spec_;
  std::vector<DenseMatrix> params_;
  std::vector<std::size_t> layer_offsets_;
  std::size_t head_offset_ = 0;
};

struct LabeledGraph {
  Graph graph;
  TargetSet targets;
  NodeLabels labels;
};

LabeledGraph make_labeled(const Subgraph& sg, const LabelingScheme& scheme);

struct Example {
  LabeledGraph input;
  double target = 0.0;
};

// --- tape-level building blocks ---------------------------------------------

Var build_input(Tape& tape, const Model& model, const Graph& g, const NodeLabels& labels);
Var layer_forward(Tape& tape, const Model& model, std::size_t layer, const Graph& g, Var h);
Var encode(Tape& tape, const Model& model, const Graph& g, const NodeLabels& labels);
Var readout(Tape& tape, const Model& model, Var h, const Graph& g, const TargetSet& targets,
            const NodeLabels& labels);
Var head(Tape& tape, const Model& model, Var link_repr);

// --- pure forward helpers -------------------------------------------------------

// Row i = embedding(label_i) ⧺ features_i; pair labels sum their two
// embeddings. Throws RangeError for a label outside the table.
DenseMatrix build_input(const Model& model, const Graph& g, const NodeLabels& labels);
DenseMatrix layer_forward(const Model& model, std::size_t layer, const Graph& g, const DenseMatrix& h);
double readout_and_score(const Model& model, const LabeledGraph& input, const DenseMatrix& h_final);
double score(const Model& model, const LabeledGraph& input);

// Rows sorted by descending last channel, ties broken by (label, degree,
// local id) ascending; the first k are kept and missing rows are kZeroRow.
std::vector<std::size_t> sortpool_rows(const DenseMatrix& h, const Graph& g, const NodeLabels& labels, std::size_t k);

struct LossAndGradients {
  double loss = 0.0;
  std::vector<DenseMatrix> gradients;
};

std::vector<DenseMatrix> zero_gradients(const Model& model);

// Summed binary cross-entropy over the batch. Throws NumericError naming the
// first example with a non-finite loss.
LossAndGradients loss_and_gradients(const Model& model, std::span<const Example> batch);
double batch_loss(const Model& model, std::span<const Example> batch);

// --- checkpoint -----------------------------------------------------------------

inline constexpr std::uint32_t kCheckpointVersion = 1;

// "LLAB", u32 version, dims, then row-major little-endian f64 blocks.
void save_model(std::ostream& out, const Model& model);
Model load_model(std::istream& in);
void save_model_file(const std::string& path, const Model& model);
Model load_model_file(const std::string& path);

}  // namespace labtrick
