#include "labtrick/autograd.hpp"

#include <algorithm>
#include <cmath>

#include "labtrick/errors.hpp"
#include "labtrick/kernels.hpp"

namespace labtrick {

// ---------------------------------------------------------------------------
// Propagation

Propagation Propagation::gcn(const Graph& g) {
  Propagation p;
  const std::size_t n = g.num_nodes();
  std::vector<double> inv_sqrt(n);
  for (NodeId i = 0; i < n; ++i) inv_sqrt[i] = 1.0 / std::sqrt(static_cast<double>(g.degree(i) + 1));
  p.offsets_.push_back(0);
  for (NodeId i = 0; i < n; ++i) {
    // Self-loop first, then neighbors in ascending order.
    p.cols_.push_back(i);
    p.weights_.push_back(inv_sqrt[i] * inv_sqrt[i]);
    for (NodeId j : g.neighbors(i)) {
      p.cols_.push_back(j);
      p.weights_.push_back(inv_sqrt[i] * inv_sqrt[j]);
    }
    p.offsets_.push_back(p.cols_.size());
  }
  return p;
}

Propagation Propagation::gin(const Graph& g, double eps) {
  Propagation p;
  p.offsets_.push_back(0);
  for (NodeId i = 0; i < g.num_nodes(); ++i) {
    p.cols_.push_back(i);
    p.weights_.push_back(1.0 + eps);
    for (NodeId j : g.neighbors(i)) {
      p.cols_.push_back(j);
      p.weights_.push_back(1.0);
    }
    p.offsets_.push_back(p.cols_.size());
  }
  return p;
}

void Propagation::apply_add(const DenseMatrix& h, DenseMatrix& out) const {
  if (h.rows() != size() || out.rows() != size() || out.cols() != h.cols()) {
    throw DimensionError("propagation operand has wrong shape");
  }
  const auto& k = kernels::active();
  for (std::size_t i = 0; i < size(); ++i) {
    for (std::size_t e = offsets_[i]; e < offsets_[i + 1]; ++e) {
      k.axpy(weights_[e], h.row(cols_[e]).data(), out.row(i).data(), h.cols());
    }
  }
}

// ---------------------------------------------------------------------------
// Tape plumbing

Var Tape::push(DenseMatrix value, bool requires_grad, std::function<void(Tape&, std::size_t)> backward) {
  debug_check_finite(value, "tape op");
  Node node;
  node.owned = std::move(value);
  node.requires_grad = requires_grad;
  if (requires_grad) node.backward = std::move(backward);
  nodes_.push_back(std::move(node));
  return Var{nodes_.size() - 1};
}

Var Tape::constant(DenseMatrix value) { return push(std::move(value), false, nullptr); }

Var Tape::parameter(std::size_t index, const DenseMatrix& value) {
  for (auto [p, id] : param_leaves_) {
    if (p == index) return Var{id};
  }
  Node node;
  node.borrowed = &value;
  node.requires_grad = true;
  node.param_index = index;
  nodes_.push_back(std::move(node));
  param_leaves_.emplace_back(index, nodes_.size() - 1);
  return Var{nodes_.size() - 1};
}

const DenseMatrix& Tape::value(Var v) const {
  const Node& n = nodes_.at(v.id);
  return n.borrowed ? *n.borrowed : n.owned;
}

DenseMatrix& Tape::grad_of(std::size_t id) {
  Node& n = nodes_[id];
  if (n.grad.empty() && n.grad.rows() == 0) {
    const DenseMatrix& v = n.borrowed ? *n.borrowed : n.owned;
    n.grad = DenseMatrix(v.rows(), v.cols());
  }
  return n.grad;
}

void Tape::backward(Var output) {
  const DenseMatrix& out = value(output);
  if (out.rows() != 1 || out.cols() != 1) throw DimensionError("backward needs a 1x1 output");
  grad_of(output.id)(0, 0) += 1.0;
  for (std::size_t id = output.id + 1; id-- > 0;) {
    Node& n = nodes_[id];
    if (!n.requires_grad || !n.backward || n.grad.rows() == 0) continue;
    n.backward(*this, id);
  }
}

void Tape::accumulate_parameter_grads(std::vector<DenseMatrix>& grads) const {
  const auto& k = kernels::active();
  for (auto [p, id] : param_leaves_) {
    const Node& n = nodes_[id];
    if (n.grad.rows() == 0) continue;
    DenseMatrix& dst = grads.at(p);
    if (dst.rows() != n.grad.rows() || dst.cols() != n.grad.cols()) throw DimensionError("gradient block shape");
    k.axpy(1.0, n.grad.values().data(), dst.values().data(), dst.size());
  }
}

// ---------------------------------------------------------------------------
// Operations

Var Tape::matmul(Var a, Var b) {
  const DenseMatrix& A = value(a);
  const DenseMatrix& B = value(b);
  if (A.cols() != B.rows()) {
    throw DimensionError("matmul " + std::to_string(A.rows()) + "x" + std::to_string(A.cols()) + " by " +
                         std::to_string(B.rows()) + "x" + std::to_string(B.cols()));
  }
  DenseMatrix C(A.rows(), B.cols());
  kernels::active().gemm_nn(A.values().data(), B.values().data(), C.values().data(), A.rows(), A.cols(), B.cols());
  return push(std::move(C), needs(a) || needs(b), [a, b](Tape& t, std::size_t self) {
    const auto& k = kernels::active();
    const DenseMatrix& G = t.nodes_[self].grad;
    const DenseMatrix& A = t.value(a);
    const DenseMatrix& B = t.value(b);
    if (t.needs(a)) {
      DenseMatrix& dA = t.grad_of(a.id);
      k.gemm_nt(G.values().data(), B.values().data(), dA.values().data(), G.rows(), B.rows(), G.cols());
    }
    if (t.needs(b)) {
      DenseMatrix& dB = t.grad_of(b.id);
      k.gemm_tn(A.values().data(), G.values().data(), dB.values().data(), A.rows(), A.cols(), G.cols());
    }
  });
}

Var Tape::add_bias(Var a, Var bias) {
  const DenseMatrix& A = value(a);
  const DenseMatrix& b = value(bias);
  if (b.rows() != 1 || b.cols() != A.cols()) throw DimensionError("bias shape");
  DenseMatrix C = A;
  const auto& k = kernels::active();
  for (std::size_t r = 0; r < C.rows(); ++r) k.axpy(1.0, b.values().data(), C.row(r).data(), C.cols());
  return push(std::move(C), needs(a) || needs(bias), [a, bias](Tape& t, std::size_t self) {
    const auto& k = kernels::active();
    const DenseMatrix& G = t.nodes_[self].grad;
    if (t.needs(a)) k.axpy(1.0, G.values().data(), t.grad_of(a.id).values().data(), G.size());
    if (t.needs(bias)) {
      DenseMatrix& db = t.grad_of(bias.id);
      for (std::size_t r = 0; r < G.rows(); ++r) k.axpy(1.0, G.row(r).data(), db.values().data(), G.cols());
    }
  });
}

Var Tape::add(Var a, Var b) {
  const DenseMatrix& A = value(a);
  const DenseMatrix& B = value(b);
  if (A.rows() != B.rows() || A.cols() != B.cols()) throw DimensionError("add shape mismatch");
  DenseMatrix C = A;
  kernels::active().axpy(1.0, B.values().data(), C.values().data(), C.size());
  return push(std::move(C), needs(a) || needs(b), [a, b](Tape& t, std::size_t self) {
    const auto& k = kernels::active();
    const DenseMatrix& G = t.nodes_[self].grad;
    if (t.needs(a)) k.axpy(1.0, G.values().data(), t.grad_of(a.id).values().data(), G.size());
    if (t.needs(b)) k.axpy(1.0, G.values().data(), t.grad_of(b.id).values().data(), G.size());
  });
}

Var Tape::relu(Var a) {
  DenseMatrix C = value(a);
  for (double& v : C.values()) v = v > 0.0 ? v : 0.0;
  return push(std::move(C), needs(a), [a](Tape& t, std::size_t self) {
    const DenseMatrix& G = t.nodes_[self].grad;
    const DenseMatrix& Y = t.nodes_[self].owned;
    DenseMatrix& dA = t.grad_of(a.id);
    for (std::size_t i = 0; i < G.size(); ++i) {
      if (Y.values()[i] > 0.0) dA.values()[i] += G.values()[i];
    }
  });
}

Var Tape::propagate(Var h, std::shared_ptr<const Propagation> p) {
  const DenseMatrix& H = value(h);
  DenseMatrix C(H.rows(), H.cols());
  p->apply_add(H, C);
  // The operator is symmetric, so the adjoint is the operator itself.
  return push(std::move(C), needs(h), [h, p = std::move(p)](Tape& t, std::size_t self) {
    p->apply_add(t.nodes_[self].grad, t.grad_of(h.id));
  });
}

Var Tape::embedding_sum(Var table, std::span<const std::uint32_t> codes, std::size_t width) {
  const DenseMatrix& T = value(table);
  if (width == 0 || codes.size() % width != 0) throw DimensionError("embedding codes not a multiple of width");
  const std::size_t rows = codes.size() / width;
  for (auto c : codes) {
    if (c >= T.rows()) {
      throw RangeError("label " + std::to_string(c) + " outside embedding table of " + std::to_string(T.rows()) +
                       " rows");
    }
  }
  DenseMatrix C(rows, T.cols());
  const auto& k = kernels::active();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t w = 0; w < width; ++w) k.axpy(1.0, T.row(codes[r * width + w]).data(), C.row(r).data(), T.cols());
  }
  std::vector<std::uint32_t> kept(codes.begin(), codes.end());
  return push(std::move(C), needs(table), [table, kept = std::move(kept), width](Tape& t, std::size_t self) {
    const auto& k = kernels::active();
    const DenseMatrix& G = t.nodes_[self].grad;
    DenseMatrix& dT = t.grad_of(table.id);
    for (std::size_t r = 0; r < G.rows(); ++r) {
      for (std::size_t w = 0; w < width; ++w) k.axpy(1.0, G.row(r).data(), dT.row(kept[r * width + w]).data(), G.cols());
    }
  });
}

Var Tape::concat_cols(Var a, Var b) {
  const DenseMatrix& A = value(a);
  const DenseMatrix& B = value(b);
  if (A.rows() != B.rows()) throw DimensionError("concat_cols row mismatch");
  DenseMatrix C(A.rows(), A.cols() + B.cols());
  for (std::size_t r = 0; r < A.rows(); ++r) {
    std::copy(A.row(r).begin(), A.row(r).end(), C.row(r).begin());
    std::copy(B.row(r).begin(), B.row(r).end(), C.row(r).begin() + static_cast<std::ptrdiff_t>(A.cols()));
  }
  const std::size_t split = A.cols();
  return push(std::move(C), needs(a) || needs(b), [a, b, split](Tape& t, std::size_t self) {
    const DenseMatrix& G = t.nodes_[self].grad;
    for (std::size_t r = 0; r < G.rows(); ++r) {
      auto row = G.row(r);
      if (t.needs(a)) {
        auto dst = t.grad_of(a.id).row(r);
        for (std::size_t c = 0; c < split; ++c) dst[c] += row[c];
      }
      if (t.needs(b)) {
        auto dst = t.grad_of(b.id).row(r);
        for (std::size_t c = split; c < row.size(); ++c) dst[c - split] += row[c];
      }
    }
  });
}

Var Tape::gather_rows(Var a, std::vector<std::size_t> rows) {
  const DenseMatrix& A = value(a);
  DenseMatrix C(rows.size(), A.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] == kZeroRow) continue;
    if (rows[r] >= A.rows()) throw DimensionError("gather row out of range");
    std::copy(A.row(rows[r]).begin(), A.row(rows[r]).end(), C.row(r).begin());
  }
  return push(std::move(C), needs(a), [a, rows = std::move(rows)](Tape& t, std::size_t self) {
    const auto& k = kernels::active();
    const DenseMatrix& G = t.nodes_[self].grad;
    DenseMatrix& dA = t.grad_of(a.id);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r] != kZeroRow) k.axpy(1.0, G.row(r).data(), dA.row(rows[r]).data(), G.cols());
    }
  });
}

Var Tape::hadamard(Var a, Var b) {
  const DenseMatrix& A = value(a);
  const DenseMatrix& B = value(b);
  if (A.rows() != B.rows() || A.cols() != B.cols()) throw DimensionError("hadamard shape mismatch");
  DenseMatrix C(A.rows(), A.cols());
  kernels::active().hadamard(A.values().data(), B.values().data(), C.values().data(), C.size());
  return push(std::move(C), needs(a) || needs(b), [a, b](Tape& t, std::size_t self) {
    const DenseMatrix& G = t.nodes_[self].grad;
    const DenseMatrix& A = t.value(a);
    const DenseMatrix& B = t.value(b);
    if (t.needs(a)) {
      auto d = t.grad_of(a.id).values();
      for (std::size_t i = 0; i < G.size(); ++i) d[i] += G.values()[i] * B.values()[i];
    }
    if (t.needs(b)) {
      auto d = t.grad_of(b.id).values();
      for (std::size_t i = 0; i < G.size(); ++i) d[i] += G.values()[i] * A.values()[i];
    }
  });
}

Var Tape::sum_rows(Var a) {
  const DenseMatrix& A = value(a);
  DenseMatrix C(1, A.cols());
  const auto& k = kernels::active();
  for (std::size_t r = 0; r < A.rows(); ++r) k.axpy(1.0, A.row(r).data(), C.values().data(), A.cols());
  return push(std::move(C), needs(a), [a](Tape& t, std::size_t self) {
    const auto& k = kernels::active();
    const DenseMatrix& G = t.nodes_[self].grad;
    DenseMatrix& dA = t.grad_of(a.id);
    for (std::size_t r = 0; r < dA.rows(); ++r) k.axpy(1.0, G.values().data(), dA.row(r).data(), G.cols());
  });
}

Var Tape::flatten(Var a) {
  const DenseMatrix& A = value(a);
  std::vector<double> data(A.values().begin(), A.values().end());
  DenseMatrix C(1, A.size(), std::move(data));
  return push(std::move(C), needs(a), [a](Tape& t, std::size_t self) {
    const DenseMatrix& G = t.nodes_[self].grad;
    kernels::active().axpy(1.0, G.values().data(), t.grad_of(a.id).values().data(), G.size());
  });
}

Var Tape::bce_with_logits(Var logit, double target) {
  const DenseMatrix& Z = value(logit);
  if (Z.rows() != 1 || Z.cols() != 1) throw DimensionError("bce needs a 1x1 logit");
  const double z = Z(0, 0);
  const double loss = std::max(z, 0.0) - z * target + std::log1p(std::exp(-std::abs(z)));
  return push(DenseMatrix(1, 1, loss), needs(logit), [logit, target](Tape& t, std::size_t self) {
    const double z = t.value(logit)(0, 0);
    const double sigmoid = z >= 0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
    t.grad_of(logit.id)(0, 0) += t.nodes_[self].grad(0, 0) * (sigmoid - target);
  });
}

}  // namespace labtrick
