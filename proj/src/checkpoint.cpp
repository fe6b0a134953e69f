#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "labtrick/errors.hpp"
#include "labtrick/model.hpp"

namespace labtrick {
namespace {

constexpr char kMagic[4] = {'L', 'L', 'A', 'B'};

void put_u32(std::ostream& out, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFFu);
  out.write(b, 4);
}

void put_u8(std::ostream& out, std::uint8_t v) { out.put(static_cast<char>(v)); }

void put_f64(std::ostream& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((bits >> (8 * i)) & 0xFFu);
  out.write(b, 8);
}

void read_exact(std::istream& in, char* buf, std::size_t n) {
  if (!in.read(buf, static_cast<std::streamsize>(n))) throw ParseError(0, "checkpoint truncated");
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  read_exact(in, reinterpret_cast<char*>(b), 4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= std::uint32_t{b[i]} << (8 * i);
  return v;
}

std::uint8_t get_u8(std::istream& in) {
  char c;
  read_exact(in, &c, 1);
  return static_cast<std::uint8_t>(c);
}

double get_f64(std::istream& in) {
  unsigned char b[8];
  read_exact(in, reinterpret_cast<char*>(b), 8);
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= std::uint64_t{b[i]} << (8 * i);
  return std::bit_cast<double>(bits);
}

}  // namespace

// Layout (all integers little-endian u32 unless noted):
//   magic "LLAB", version,
//   embedding_rows, embed_dim, feature_dim, head_hidden,
//   readout kind (u8), sortpool k,
//   layer count, per layer: kind (u8), activation (u8), in_dim, out_dim, gin_eps (f64),
//   block count, per block: rows, cols, rows*cols f64 values.
void save_model(std::ostream& out, const Model& model) {
  const ModelSpec& s = model.spec();
  out.write(kMagic, 4);
  put_u32(out, kCheckpointVersion);
  put_u32(out, static_cast<std::uint32_t>(s.embedding_rows));
  put_u32(out, static_cast<std::uint32_t>(s.embed_dim));
  put_u32(out, static_cast<std::uint32_t>(s.feature_dim));
  put_u32(out, static_cast<std::uint32_t>(s.head_hidden));
  put_u8(out, static_cast<std::uint8_t>(s.readout.kind));
  put_u32(out, static_cast<std::uint32_t>(s.readout.k));
  put_u32(out, static_cast<std::uint32_t>(s.layers.size()));
  for (const auto& l : s.layers) {
    put_u8(out, static_cast<std::uint8_t>(l.kind));
    put_u8(out, static_cast<std::uint8_t>(l.activation));
    put_u32(out, static_cast<std::uint32_t>(l.in_dim));
    put_u32(out, static_cast<std::uint32_t>(l.out_dim));
    put_f64(out, l.gin_eps);
  }
  put_u32(out, static_cast<std::uint32_t>(model.parameters().size()));
  for (const auto& p : model.parameters()) {
    put_u32(out, static_cast<std::uint32_t>(p.rows()));
    put_u32(out, static_cast<std::uint32_t>(p.cols()));
    for (double v : p.values()) put_f64(out, v);
  }
  if (!out) throw Error("failed writing checkpoint");
}

Model load_model(std::istream& in) {
  char magic[4];
  read_exact(in, magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0) throw ParseError(0, "not a checkpoint (bad magic)");
  const auto version = get_u32(in);
  if (version != kCheckpointVersion) throw ParseError(0, "unsupported checkpoint version " + std::to_string(version));
  ModelSpec s;
  s.embedding_rows = get_u32(in);
  s.embed_dim = get_u32(in);
  s.feature_dim = get_u32(in);
  s.head_hidden = get_u32(in);
  const auto readout = get_u8(in);
  if (readout > static_cast<std::uint8_t>(ReadoutKind::sortpool)) throw ParseError(0, "bad readout kind");
  s.readout.kind = static_cast<ReadoutKind>(readout);
  s.readout.k = get_u32(in);
  const auto layers = get_u32(in);
  for (std::uint32_t i = 0; i < layers; ++i) {
    LayerSpec l;
    const auto kind = get_u8(in);
    const auto act = get_u8(in);
    if (kind > 1 || act > 1) throw ParseError(0, "bad layer descriptor");
    l.kind = static_cast<LayerKind>(kind);
    l.activation = static_cast<Activation>(act);
    l.in_dim = get_u32(in);
    l.out_dim = get_u32(in);
    l.gin_eps = get_f64(in);
    s.layers.push_back(l);
  }
  const auto blocks = get_u32(in);
  std::vector<DenseMatrix> params;
  for (std::uint32_t b = 0; b < blocks; ++b) {
    const auto rows = get_u32(in);
    const auto cols = get_u32(in);
    std::vector<double> values(std::size_t{rows} * cols);
    for (double& v : values) v = get_f64(in);
    params.emplace_back(rows, cols, std::move(values));
  }
  return Model(std::move(s), std::move(params));
}

void save_model_file(const std::string& path, const Model& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path + " for writing");
  save_model(out, model);
}

Model load_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  return load_model(in);
}

}  // namespace labtrick
