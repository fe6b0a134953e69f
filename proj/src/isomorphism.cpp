#include "labtrick/isomorphism.hpp"

#include <algorithm>
#include <array>
#include <cstring>
#include <numeric>

#include "labtrick/errors.hpp"

namespace labtrick {
namespace {

using AdjacencyBits = std::array<std::uint16_t, kOracleNodeLimit>;
using NodeKey = std::vector<std::uint64_t>;

static_assert(kOracleNodeLimit <= 16, "adjacency rows are 16-bit masks");

void check_capacity(const Graph& g) {
  if (g.num_nodes() > kOracleNodeLimit) {
    throw CapacityError("brute-force oracle handles at most " + std::to_string(kOracleNodeLimit) +
                        " nodes, got " + std::to_string(g.num_nodes()) + "; use sampled checks instead");
  }
}

Color color_of(const ColoredView& v, NodeId i) { return v.colors.empty() ? 0 : v.colors[i]; }

void check_colors(const ColoredView& v) {
  if (!v.colors.empty() && v.colors.size() != v.graph.num_nodes()) {
    throw DimensionError("color vector length does not match node count");
  }
  v.targets.check_against(v.graph);
}

AdjacencyBits adjacency_bits(const Graph& g) {
  AdjacencyBits bits{};
  for (NodeId u = 0; u < g.num_nodes(); ++u) {
    for (NodeId v : g.neighbors(u)) bits[u] |= static_cast<std::uint16_t>(1u << v);
  }
  return bits;
}

// Isomorphism-invariant node key: own (membership, color, degree) followed by
// the sorted multiset of the same triple over neighbors.
std::vector<NodeKey> node_keys(const ColoredView& v) {
  const Graph& g = v.graph;
  auto base = [&](NodeId i) {
    return std::array<std::uint64_t, 3>{v.targets.contains(i) ? 0u : 1u, color_of(v, i), g.degree(i)};
  };
  std::vector<NodeKey> keys(g.num_nodes());
  for (NodeId i = 0; i < g.num_nodes(); ++i) {
    auto own = base(i);
    NodeKey key(own.begin(), own.end());
    std::vector<std::array<std::uint64_t, 3>> nb;
    for (NodeId j : g.neighbors(i)) nb.push_back(base(j));
    std::sort(nb.begin(), nb.end());
    for (const auto& t : nb) key.insert(key.end(), t.begin(), t.end());
    keys[i] = std::move(key);
  }
  return keys;
}

class IsomorphismSearch {
 public:
  IsomorphismSearch(const ColoredView& a, const ColoredView& b,
                    const std::function<bool(const Permutation&)>& visit)
      : n_(a.graph.num_nodes()), adj_a_(adjacency_bits(a.graph)), adj_b_(adjacency_bits(b.graph)),
        keys_a_(node_keys(a)), keys_b_(node_keys(b)), visit_(visit) {
    // Assign b-nodes with the rarest keys first; ties by descending degree.
    order_.resize(n_);
    std::iota(order_.begin(), order_.end(), NodeId{0});
    auto rarity = [&](NodeId x) {
      return std::count(keys_a_.begin(), keys_a_.end(), keys_b_[x]);
    };
    std::stable_sort(order_.begin(), order_.end(), [&](NodeId x, NodeId y) {
      auto rx = rarity(x), ry = rarity(y);
      if (rx != ry) return rx < ry;
      return b.graph.degree(x) > b.graph.degree(y);
    });
    mapping_.assign(n_, 0);
  }

  std::size_t run() {
    if (!std::is_permutation(keys_a_.begin(), keys_a_.end(), keys_b_.begin(), keys_b_.end())) return 0;
    extend(0, 0);
    return found_;
  }

 private:
  bool extend(std::size_t depth, std::uint16_t used) {
    if (depth == n_) {
      ++found_;
      return visit_(Permutation(mapping_));
    }
    NodeId x = order_[depth];
    for (NodeId c = 0; c < n_; ++c) {
      if ((used >> c) & 1u) continue;
      if (keys_a_[c] != keys_b_[x]) continue;
      bool ok = true;
      for (std::size_t d = 0; d < depth && ok; ++d) {
        NodeId y = order_[d];
        bool eb = (adj_b_[x] >> y) & 1u;
        bool ea = (adj_a_[c] >> mapping_[y]) & 1u;
        ok = eb == ea;
      }
      if (!ok) continue;
      mapping_[x] = c;
      if (!extend(depth + 1, static_cast<std::uint16_t>(used | (1u << c)))) return false;
    }
    return true;
  }

  std::size_t n_;
  AdjacencyBits adj_a_, adj_b_;
  std::vector<NodeKey> keys_a_, keys_b_;
  const std::function<bool(const Permutation&)>& visit_;
  std::vector<NodeId> order_;
  std::vector<NodeId> mapping_;
  std::size_t found_ = 0;
};

bool compatible_shapes(const ColoredView& a, const ColoredView& b) {
  return a.graph.num_nodes() == b.graph.num_nodes() && a.graph.num_edges() == b.graph.num_edges() &&
         a.targets.size() == b.targets.size();
}

}  // namespace

std::size_t for_each_isomorphism(const ColoredView& a, const ColoredView& b,
                                 const std::function<bool(const Permutation&)>& visit) {
  check_capacity(a.graph);
  check_capacity(b.graph);
  check_colors(a);
  check_colors(b);
  if (!compatible_shapes(a, b)) return 0;
  IsomorphismSearch search(a, b, visit);
  return search.run();
}

std::optional<Permutation> are_isomorphic(const ColoredView& a, const ColoredView& b) {
  std::optional<Permutation> witness;
  for_each_isomorphism(a, b, [&](const Permutation& p) {
    witness = p;
    return false;
  });
  return witness;
}

std::optional<Permutation> are_isomorphic(const Graph& g1, const TargetSet& s1, const Graph& g2,
                                          const TargetSet& s2) {
  return are_isomorphic(ColoredView{g1, s1}, ColoredView{g2, s2});
}

// ---------------------------------------------------------------------------
// Canonical code: nodes are grouped into classes by the invariant key; within
// classes every arrangement is tried and the lexicographically smallest
// upper-triangle adjacency string wins, with prefix pruning.

namespace {

class CanonicalSearch {
 public:
  CanonicalSearch(const Graph& g, std::vector<NodeKey> keys)
      : n_(g.num_nodes()), adj_(adjacency_bits(g)), keys_(std::move(keys)) {
    std::vector<NodeId> sorted(n_);
    std::iota(sorted.begin(), sorted.end(), NodeId{0});
    std::stable_sort(sorted.begin(), sorted.end(), [&](NodeId x, NodeId y) { return keys_[x] < keys_[y]; });
    for (NodeId v : sorted) slot_keys_.push_back(&keys_[v]);
    bits_.assign(n_ * (n_ - (n_ > 0 ? 1 : 0)) / 2, 0);
    best_.assign(bits_.size(), 1);
    placed_.assign(n_, 0);
  }

  std::vector<std::uint8_t> run() {
    have_best_ = false;
    extend(0, 0);
    return best_;
  }

  const std::vector<const NodeKey*>& slot_keys() const { return slot_keys_; }

 private:
  static std::size_t row_start(std::size_t k) { return k * (k - (k > 0 ? 1 : 0)) / 2; }

  // Current prefix (positions < k) compared with the same prefix of best_.
  int compare_prefix(std::size_t k) const {
    const std::size_t len = row_start(k);
    for (std::size_t i = 0; i < len; ++i) {
      if (bits_[i] != best_[i]) return bits_[i] < best_[i] ? -1 : 1;
    }
    return 0;
  }

  void extend(std::size_t k, std::uint16_t used) {
    if (k == n_) {
      if (!have_best_ || bits_ < best_) best_ = bits_;
      have_best_ = true;
      return;
    }
    for (NodeId c = 0; c < n_; ++c) {
      if ((used >> c) & 1u) continue;
      if (keys_[c] != *slot_keys_[k]) continue;
      const std::size_t base = row_start(k);
      for (std::size_t j = 0; j < k; ++j) bits_[base + j] = (adj_[c] >> placed_[j]) & 1u;
      if (have_best_ && compare_prefix(k + 1) > 0) continue;
      placed_[k] = c;
      extend(k + 1, static_cast<std::uint16_t>(used | (1u << c)));
    }
  }

  std::size_t n_;
  AdjacencyBits adj_;
  std::vector<NodeKey> keys_;
  std::vector<const NodeKey*> slot_keys_;
  std::vector<std::uint8_t> bits_;
  std::vector<std::uint8_t> best_;
  std::vector<NodeId> placed_;
  bool have_best_ = false;
};

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
}

}  // namespace

std::string CanonicalCode::hex() const {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes_.size() * 2);
  for (unsigned char c : bytes_) {
    out.push_back(digits[c >> 4]);
    out.push_back(digits[c & 0xF]);
  }
  return out;
}

CanonicalCode canonical_code(const Graph& g, std::span<const Color> colors, const TargetSet& targets) {
  check_capacity(g);
  ColoredView view{g, targets, colors};
  check_colors(view);
  CanonicalSearch search(g, node_keys(view));
  auto bits = search.run();

  std::string out;
  put_u64(out, g.num_nodes());
  put_u64(out, targets.size());
  for (const NodeKey* key : search.slot_keys()) {
    put_u64(out, key->size());
    for (std::uint64_t w : *key) put_u64(out, w);
  }
  std::uint8_t acc = 0;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    acc = static_cast<std::uint8_t>(acc | (bits[i] << (i % 8)));
    if (i % 8 == 7 || i + 1 == bits.size()) {
      out.push_back(static_cast<char>(acc));
      acc = 0;
    }
  }
  return CanonicalCode(std::move(out));
}

}  // namespace labtrick
