#include "labtrick/graph.hpp"

#include <algorithm>
#include <charconv>
#include <deque>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "labtrick/errors.hpp"

namespace labtrick {

std::string format_distance(Distance d) {
  return d == kInfDistance ? std::string("inf") : std::to_string(d);
}

Distance parse_distance(const std::string& text) {
  if (text == "inf") return kInfDistance;
  Distance d = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), d);
  if (ec != std::errc() || ptr != text.data() + text.size() || d == kInfDistance) {
    throw InvalidArgument("bad distance '" + text + "'");
  }
  return d;
}

// ---------------------------------------------------------------------------
// Graph

Graph Graph::from_edges(std::size_t num_nodes, std::span<const std::pair<NodeId, NodeId>> edges) {
  std::vector<std::vector<NodeId>> adj(num_nodes);
  for (auto [u, v] : edges) {
    if (u >= num_nodes || v >= num_nodes) {
      throw InvalidArgument("edge (" + std::to_string(u) + "," + std::to_string(v) +
                            ") out of range for " + std::to_string(num_nodes) + " nodes");
    }
    if (u == v) continue;
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  Graph g;
  g.offsets_.reserve(num_nodes + 1);
  g.offsets_.push_back(0);
  for (auto& list : adj) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
    g.neighbors_.insert(g.neighbors_.end(), list.begin(), list.end());
    g.offsets_.push_back(g.neighbors_.size());
  }
  return g;
}

Graph Graph::with_features(DenseMatrix features) const {
  if (features.rows() != num_nodes()) {
    throw DimensionError("feature rows " + std::to_string(features.rows()) + " != nodes " +
                         std::to_string(num_nodes()));
  }
  Graph g = *this;
  g.features_ = std::move(features);
  return g;
}

bool Graph::has_edge(NodeId u, NodeId v) const {
  auto nb = neighbors(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

std::vector<std::pair<NodeId, NodeId>> Graph::edges() const {
  std::vector<std::pair<NodeId, NodeId>> out;
  out.reserve(num_edges());
  for (NodeId u = 0; u < num_nodes(); ++u) {
    for (NodeId v : neighbors(u)) {
      if (u < v) out.emplace_back(u, v);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Permutation / TargetSet

Permutation::Permutation(std::vector<NodeId> mapping) : mapping_(std::move(mapping)) {
  std::vector<bool> seen(mapping_.size(), false);
  for (NodeId v : mapping_) {
    if (v >= mapping_.size() || seen[v]) throw InvalidArgument("mapping is not a bijection");
    seen[v] = true;
  }
}

Permutation Permutation::identity(std::size_t n) {
  std::vector<NodeId> m(n);
  for (std::size_t i = 0; i < n; ++i) m[i] = static_cast<NodeId>(i);
  return Permutation(std::move(m));
}

Permutation Permutation::inverse() const {
  std::vector<NodeId> inv(mapping_.size());
  for (std::size_t i = 0; i < mapping_.size(); ++i) inv[mapping_[i]] = static_cast<NodeId>(i);
  return Permutation(std::move(inv));
}

TargetSet::TargetSet(std::initializer_list<NodeId> nodes) : TargetSet(std::vector<NodeId>(nodes)) {}

TargetSet::TargetSet(std::vector<NodeId> nodes) : nodes_(std::move(nodes)) {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    for (std::size_t j = i + 1; j < nodes_.size(); ++j) {
      if (nodes_[i] == nodes_[j]) throw InvalidArgument("target set has a repeated node");
    }
  }
}

bool TargetSet::contains(NodeId v) const {
  return std::find(nodes_.begin(), nodes_.end(), v) != nodes_.end();
}

void TargetSet::check_against(const Graph& g) const {
  for (NodeId v : nodes_) {
    if (v >= g.num_nodes()) {
      throw InvalidArgument("target " + std::to_string(v) + " out of range for " +
                            std::to_string(g.num_nodes()) + " nodes");
    }
  }
}

TargetSet TargetSet::mapped(const Permutation& p) const {
  std::vector<NodeId> out;
  out.reserve(nodes_.size());
  for (NodeId v : nodes_) out.push_back(p(v));
  return TargetSet(std::move(out));
}

bool TargetSet::same_set(const TargetSet& other) const {
  if (size() != other.size()) return false;
  auto a = nodes_, b = other.nodes_;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return a == b;
}

// ---------------------------------------------------------------------------
// Text formats

namespace {

bool is_blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); });
}

bool is_comment(const std::string& line) {
  auto pos = line.find_first_not_of(" \t\r");
  return pos != std::string::npos && line[pos] == '#';
}

std::uint64_t parse_id(const std::string& token, std::size_t line_no) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw ParseError(line_no, "expected a non-negative integer, got '" + token + "'");
  }
  return v;
}

template <typename Visit>
IngestReport scan_edge_lines(std::istream& in, Visit&& visit) {
  IngestReport report;
  std::string line;
  while (std::getline(in, line)) {
    ++report.lines;
    if (is_blank(line)) continue;
    if (is_comment(line)) {
      ++report.comment_lines;
      continue;
    }
    std::istringstream fields(line);
    std::string a, b, extra;
    if (!(fields >> a >> b)) throw ParseError(report.lines, "expected two node ids");
    if (fields >> extra) throw ParseError(report.lines, "unexpected token '" + extra + "'");
    visit(parse_id(a, report.lines), parse_id(b, report.lines));
    ++report.edges_read;
  }
  return report;
}

}  // namespace

EdgeListGraph parse_edge_list(std::istream& in) {
  EdgeListGraph result;
  std::unordered_map<std::uint64_t, NodeId> remap;
  std::vector<std::pair<NodeId, NodeId>> edges;
  auto local = [&](std::uint64_t id) {
    auto [it, inserted] = remap.try_emplace(id, static_cast<NodeId>(result.original_ids.size()));
    if (inserted) result.original_ids.push_back(id);
    return it->second;
  };
  result.report = scan_edge_lines(in, [&](std::uint64_t a, std::uint64_t b) {
    NodeId u = local(a);
    NodeId v = local(b);
    edges.emplace_back(u, v);
  });

  std::vector<std::pair<NodeId, NodeId>> kept;
  kept.reserve(edges.size());
  for (auto [u, v] : edges) {
    if (u == v) {
      ++result.report.self_loops_dropped;
      continue;
    }
    kept.emplace_back(std::min(u, v), std::max(u, v));
  }
  std::sort(kept.begin(), kept.end());
  auto last = std::unique(kept.begin(), kept.end());
  result.report.duplicates_dropped = static_cast<std::size_t>(kept.end() - last);
  kept.erase(last, kept.end());
  result.graph = Graph::from_edges(result.original_ids.size(), kept);
  return result;
}

EdgeListGraph parse_edge_list_text(const std::string& text) {
  std::istringstream in(text);
  return parse_edge_list(in);
}

std::vector<std::pair<std::uint64_t, std::uint64_t>> read_edge_pairs(std::istream& in) {
  std::vector<std::pair<std::uint64_t, std::uint64_t>> out;
  scan_edge_lines(in, [&](std::uint64_t a, std::uint64_t b) { out.emplace_back(a, b); });
  return out;
}

DenseMatrix parse_feature_csv(std::istream& in) {
  std::vector<double> values;
  std::size_t cols = 0, rows = 0, line_no = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    std::size_t count = 0;
    std::istringstream fields(line);
    std::string cell;
    while (std::getline(fields, cell, ',')) {
      try {
        std::size_t used = 0;
        double v = std::stod(cell, &used);
        if (!is_blank(cell.substr(used))) throw std::invalid_argument(cell);
        values.push_back(v);
      } catch (const std::exception&) {
        throw ParseError(line_no, "bad feature value '" + cell + "'");
      }
      ++count;
    }
    if (rows == 0) cols = count;
    if (count != cols) {
      throw ParseError(line_no, "expected " + std::to_string(cols) + " columns, got " + std::to_string(count));
    }
    ++rows;
  }
  return DenseMatrix(rows, cols, std::move(values));
}

void write_edge_list(std::ostream& out, std::span<const std::pair<NodeId, NodeId>> edges,
                     std::span<const std::uint64_t> original_ids) {
  for (auto [u, v] : edges) {
    if (original_ids.empty()) {
      out << u << ' ' << v << '\n';
    } else {
      out << original_ids[u] << ' ' << original_ids[v] << '\n';
    }
  }
}

// ---------------------------------------------------------------------------
// Structural operations

Graph apply_permutation(const Graph& g, const Permutation& p) {
  if (p.size() != g.num_nodes()) {
    throw DimensionError("permutation of length " + std::to_string(p.size()) + " applied to " +
                         std::to_string(g.num_nodes()) + "-node graph");
  }
  auto edges = g.edges();
  for (auto& [u, v] : edges) {
    u = p(u);
    v = p(v);
  }
  Graph out = Graph::from_edges(g.num_nodes(), edges);
  if (g.has_features()) {
    const DenseMatrix& f = g.features();
    DenseMatrix moved(f.rows(), f.cols());
    for (std::size_t i = 0; i < f.rows(); ++i) {
      std::copy(f.row(i).begin(), f.row(i).end(), moved.row(p(static_cast<NodeId>(i))).begin());
    }
    out = out.with_features(std::move(moved));
  }
  return out;
}

std::vector<Distance> bfs_distances(const Graph& g, NodeId src, std::span<const NodeId> masked) {
  if (src >= g.num_nodes()) throw InvalidArgument("bfs source out of range");
  std::vector<Distance> dist(g.num_nodes(), kInfDistance);
  std::vector<bool> blocked(g.num_nodes(), false);
  for (NodeId m : masked) {
    if (m == src) throw InvalidArgument("bfs source is masked");
    if (m < g.num_nodes()) blocked[m] = true;
  }
  std::deque<NodeId> queue{src};
  dist[src] = 0;
  while (!queue.empty()) {
    NodeId u = queue.front();
    queue.pop_front();
    for (NodeId v : g.neighbors(u)) {
      if (blocked[v] || dist[v] != kInfDistance) continue;
      dist[v] = dist[u] + 1;
      queue.push_back(v);
    }
  }
  return dist;
}

namespace {

std::vector<std::vector<Distance>> masked_target_distances(const Graph& g, const TargetSet& targets) {
  std::vector<std::vector<Distance>> out;
  out.reserve(targets.size());
  for (std::size_t t = 0; t < targets.size(); ++t) {
    std::vector<NodeId> masked;
    if (targets.size() == 2) masked.push_back(targets[1 - t]);
    out.push_back(bfs_distances(g, targets[t], masked));
  }
  return out;
}

}  // namespace

Subgraph extract_enclosing_subgraph(const Graph& g, const TargetSet& targets, std::size_t hop,
                                    ExtractOptions options) {
  targets.check_against(g);
  if (targets.empty()) throw InvalidArgument("enclosing subgraph needs at least one target");
  const bool drop_link = options.remove_target_link && targets.size() == 2;
  auto skip = [&](NodeId a, NodeId b) {
    return drop_link && ((a == targets[0] && b == targets[1]) || (a == targets[1] && b == targets[0]));
  };

  // Multi-source BFS bounded by `hop`.
  std::vector<Distance> dist(g.num_nodes(), kInfDistance);
  std::deque<NodeId> queue;
  for (NodeId t : targets.nodes()) {
    dist[t] = 0;
    queue.push_back(t);
  }
  std::vector<NodeId> others;
  while (!queue.empty()) {
    NodeId u = queue.front();
    queue.pop_front();
    if (dist[u] >= hop) continue;
    for (NodeId v : g.neighbors(u)) {
      if (dist[v] != kInfDistance || skip(u, v)) continue;
      dist[v] = dist[u] + 1;
      others.push_back(v);
      queue.push_back(v);
    }
  }
  std::sort(others.begin(), others.end());

  Subgraph sg;
  sg.hop = hop;
  sg.parent_ids = targets.nodes();
  sg.parent_ids.insert(sg.parent_ids.end(), others.begin(), others.end());
  std::unordered_map<NodeId, NodeId> local;
  local.reserve(sg.parent_ids.size());
  for (std::size_t i = 0; i < sg.parent_ids.size(); ++i) local.emplace(sg.parent_ids[i], static_cast<NodeId>(i));

  std::vector<std::pair<NodeId, NodeId>> edges;
  for (std::size_t i = 0; i < sg.parent_ids.size(); ++i) {
    NodeId pu = sg.parent_ids[i];
    for (NodeId pv : g.neighbors(pu)) {
      auto it = local.find(pv);
      if (it == local.end() || it->second <= i || skip(pu, pv)) continue;
      edges.emplace_back(static_cast<NodeId>(i), it->second);
    }
  }
  sg.graph = Graph::from_edges(sg.parent_ids.size(), edges);
  if (g.has_features()) {
    const DenseMatrix& f = g.features();
    DenseMatrix sub(sg.parent_ids.size(), f.cols());
    for (std::size_t i = 0; i < sg.parent_ids.size(); ++i) {
      auto src = f.row(sg.parent_ids[i]);
      std::copy(src.begin(), src.end(), sub.row(i).begin());
    }
    sg.graph = sg.graph.with_features(std::move(sub));
  }
  std::vector<NodeId> local_targets(targets.size());
  for (std::size_t t = 0; t < targets.size(); ++t) local_targets[t] = static_cast<NodeId>(t);
  sg.targets = TargetSet(std::move(local_targets));
  sg.dist_to_target = masked_target_distances(sg.graph, sg.targets);
  return sg;
}

Subgraph whole_graph_view(const Graph& g, const TargetSet& targets) {
  targets.check_against(g);
  Subgraph sg;
  sg.parent_ids.resize(g.num_nodes());
  for (std::size_t i = 0; i < g.num_nodes(); ++i) sg.parent_ids[i] = static_cast<NodeId>(i);
  sg.graph = g;
  sg.targets = targets;
  sg.hop = g.num_nodes();
  sg.dist_to_target = masked_target_distances(g, targets);
  return sg;
}

}  // namespace labtrick
