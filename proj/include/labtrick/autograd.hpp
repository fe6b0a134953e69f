#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <vector>

#include "labtrick/graph.hpp"
#include "labtrick/matrix.hpp"

namespace labtrick {

// Sparse symmetric propagation operator over a graph's nodes.
class Propagation {
 public:
  // D^{-1/2} (A + I) D^{-1/2} with D the degree matrix of A + I.
  static Propagation gcn(const Graph& g);
  // (1 + eps) I + A.
  static Propagation gin(const Graph& g, double eps);

  std::size_t size() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  // out += P · h
  void apply_add(const DenseMatrix& h, DenseMatrix& out) const;

 private:
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> cols_;
  std::vector<double> weights_;
};

struct Var {
  std::size_t id = 0;
};

inline constexpr std::size_t kZeroRow = std::numeric_limits<std::size_t>::max();

// Reverse-mode tape over dense matrices. Parameters are borrowed (not
// copied) and must outlive the tape.
class Tape {
 public:
  Var constant(DenseMatrix value);
  // Leaf for model parameter block `index`; repeated calls return the same Var.
  Var parameter(std::size_t index, const DenseMatrix& value);

  const DenseMatrix& value(Var v) const;
  double scalar(Var v) const { return value(v)(0, 0); }

  Var matmul(Var a, Var b);
  Var add_bias(Var a, Var bias);
  Var add(Var a, Var b);
  Var relu(Var a);
  Var propagate(Var h, std::shared_ptr<const Propagation> p);
  // Row i = sum over k < width of table row codes[i * width + k].
  Var embedding_sum(Var table, std::span<const std::uint32_t> codes, std::size_t width);
  Var concat_cols(Var a, Var b);
  // Output row r copies input row rows[r]; kZeroRow yields a zero row.
  Var gather_rows(Var a, std::vector<std::size_t> rows);
  Var hadamard(Var a, Var b);
  Var sum_rows(Var a);
  Var flatten(Var a);
  // Numerically stable binary cross-entropy of a 1x1 logit.
  Var bce_with_logits(Var logit, double target);

  // Seeds d(output)/d(output) = 1; output must be 1x1.
  void backward(Var output);
  // grads[index] += gradient of every parameter leaf.
  void accumulate_parameter_grads(std::vector<DenseMatrix>& grads) const;

  std::size_t size() const noexcept { return nodes_.size(); }

 private:
  struct Node {
    DenseMatrix owned;
    const DenseMatrix* borrowed = nullptr;
    DenseMatrix grad;
    std::function<void(Tape&, std::size_t)> backward;
    std::size_t param_index = std::numeric_limits<std::size_t>::max();
    bool requires_grad = false;
  };

  Var push(DenseMatrix value, bool requires_grad, std::function<void(Tape&, std::size_t)> backward);
  DenseMatrix& grad_of(std::size_t id);
  bool needs(Var v) const { return nodes_[v.id].requires_grad; }

  std::vector<Node> nodes_;
  std::vector<std::pair<std::size_t, std::size_t>> param_leaves_;  // (param index, node id)
};

}  // namespace labtrick
