#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "labtrick/matrix.hpp"

namespace labtrick {

using NodeId = std::uint32_t;
using Distance = std::uint32_t;

// Reserved distance for unreachable or masked nodes; serialized as "inf".
inline constexpr Distance kInfDistance = std::numeric_limits<Distance>::max();

std::string format_distance(Distance d);
Distance parse_distance(const std::string& text);

// Immutable simple undirected graph in compressed sparse row form with
// strictly ascending neighbor lists and optional dense node features.
class Graph {
 public:
  Graph() = default;

  // Self-loops and repeated edges are dropped. Throws InvalidArgument on an
  // endpoint >= num_nodes.
  static Graph from_edges(std::size_t num_nodes,
                          std::span<const std::pair<NodeId, NodeId>> edges);

  // Returns a copy carrying `features` (rows must equal num_nodes()).
  Graph with_features(DenseMatrix features) const;

  std::size_t num_nodes() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t num_edges() const noexcept { return neighbors_.size() / 2; }

  std::span<const NodeId> neighbors(NodeId v) const {
    return {neighbors_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
  }
  std::size_t degree(NodeId v) const { return offsets_[v + 1] - offsets_[v]; }
  bool has_edge(NodeId u, NodeId v) const;

  // Every edge once, as (u, v) with u < v, in ascending order.
  std::vector<std::pair<NodeId, NodeId>> edges() const;

  bool has_features() const noexcept { return features_.has_value(); }
  const DenseMatrix& features() const { return *features_; }
  std::size_t feature_dim() const noexcept { return features_ ? features_->cols() : 0; }

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> neighbors_;
  std::optional<DenseMatrix> features_;
};

// Bijection on 0..n-1.
class Permutation {
 public:
  Permutation() = default;
  // Throws InvalidArgument if `mapping` is not a bijection.
  explicit Permutation(std::vector<NodeId> mapping);

  static Permutation identity(std::size_t n);

  std::size_t size() const noexcept { return mapping_.size(); }
  NodeId operator()(NodeId i) const { return mapping_[i]; }
  const std::vector<NodeId>& mapping() const noexcept { return mapping_; }
  Permutation inverse() const;

  friend bool operator==(const Permutation&, const Permutation&) = default;

 private:
  std::vector<NodeId> mapping_;
};

// Ordered set of distinct target nodes. For links, nodes()[0] is the source
// and nodes()[1] the destination.
class TargetSet {
 public:
  TargetSet() = default;
  TargetSet(std::initializer_list<NodeId> nodes);
  explicit TargetSet(std::vector<NodeId> nodes);

  std::size_t size() const noexcept { return nodes_.size(); }
  bool empty() const noexcept { return nodes_.empty(); }
  NodeId operator[](std::size_t i) const { return nodes_[i]; }
  const std::vector<NodeId>& nodes() const noexcept { return nodes_; }
  bool contains(NodeId v) const;

  // Throws InvalidArgument if any id is out of range for `g`.
  void check_against(const Graph& g) const;

  TargetSet mapped(const Permutation& p) const;
  // Set equality, ignoring order.
  bool same_set(const TargetSet& other) const;

  friend bool operator==(const TargetSet&, const TargetSet&) = default;

 private:
  std::vector<NodeId> nodes_;
};

// Enclosing subgraph around a target set. Local ids 0..|S|-1 are the
// targets in order; the remaining nodes follow in ascending parent id.
struct Subgraph {
  std::vector<NodeId> parent_ids;
  Graph graph;
  TargetSet targets;
  std::size_t hop = 0;
  // dist_to_target[t][i]: distance from local node i to targets[t]. With two
  // targets the other target is masked while measuring.
  std::vector<std::vector<Distance>> dist_to_target;

  std::size_t num_nodes() const noexcept { return graph.num_nodes(); }
};

struct IngestReport {
  std::size_t lines = 0;
  std::size_t comment_lines = 0;
  std::size_t edges_read = 0;
  std::size_t self_loops_dropped = 0;
  std::size_t duplicates_dropped = 0;
};

struct EdgeListGraph {
  Graph graph;
  // original_ids[local] = id as written in the file.
  std::vector<std::uint64_t> original_ids;
  IngestReport report;
};

// Reads "u v" lines ('#' comments, blank lines skipped). Ids are remapped to
// a contiguous range in first-appearance order.
EdgeListGraph parse_edge_list(std::istream& in);
EdgeListGraph parse_edge_list_text(const std::string& text);

// Raw (u, v) pairs as written, without remapping or deduplication.
std::vector<std::pair<std::uint64_t, std::uint64_t>> read_edge_pairs(std::istream& in);

// Header-free CSV, row i holding the features of node i.
DenseMatrix parse_feature_csv(std::istream& in);

void write_edge_list(std::ostream& out, std::span<const std::pair<NodeId, NodeId>> edges,
                     std::span<const std::uint64_t> original_ids = {});

Graph apply_permutation(const Graph& g, const Permutation& p);

// Shortest-path lengths from `src` after deleting `masked` nodes and their
// edges. Unreachable and masked nodes get kInfDistance.
std::vector<Distance> bfs_distances(const Graph& g, NodeId src, std::span<const NodeId> masked = {});

struct ExtractOptions {
  // Drop the edge between the two targets before extraction.
  bool remove_target_link = false;
};

Subgraph extract_enclosing_subgraph(const Graph& g, const TargetSet& targets, std::size_t hop,
                                    ExtractOptions options = {});

// The whole graph viewed as a subgraph with identity ids and masked
// per-target distances. Used wherever labels must live on the full graph.
Subgraph whole_graph_view(const Graph& g, const TargetSet& targets);

}  // namespace labtrick
