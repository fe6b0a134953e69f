#include "labtrick/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "labtrick/errors.hpp"
#include "labtrick/parallel.hpp"

namespace labtrick {

using nlohmann::json;

MetricSpec MetricSpec::parse(const std::string& s) {
  const auto colon = s.find(':');
  if (colon == std::string::npos) throw ConfigError("metric must look like hits:K or mrr:N, got '" + s + "'");
  const std::string kind = s.substr(0, colon);
  const std::string num = s.substr(colon + 1);
  MetricSpec m;
  if (kind == "hits") {
    m.kind = Kind::hits;
  } else if (kind == "mrr") {
    m.kind = Kind::mrr;
  } else {
    throw ConfigError("unknown metric '" + kind + "'");
  }
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(num, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (num.empty() || used != num.size() || v == 0) throw ConfigError("metric count must be a positive integer: '" + s + "'");
  m.value = static_cast<std::size_t>(v);
  return m;
}

std::string MetricSpec::to_string() const {
  return (kind == Kind::hits ? "hits:" : "mrr:") + std::to_string(value);
}

namespace {

template <typename T>
T get_as(const json& j, const char* key) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config key '") + key + "' has the wrong type");
  }
}

std::size_t get_count(const json& j, const char* key) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0)) {
    throw ConfigError(std::string("config key '") + key + "' must be a non-negative integer");
  }
  return j.get<std::size_t>();
}

double get_real(const json& j, const char* key) {
  if (!j.is_number()) throw ConfigError(std::string("config key '") + key + "' must be a number");
  return j.get<double>();
}

std::string optimizer_name(OptimizerKind k) { return k == OptimizerKind::adam ? "adam" : "momentum"; }

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (std::uint64_t{out[0]} << 32) | out[1];
}

std::uint64_t edge_key(NodeId u, NodeId v) {
  if (u > v) std::swap(u, v);
  return (std::uint64_t{u} << 32) | v;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  ExperimentConfig c;
  std::optional<std::string> scheme_name;
  bool scheme_given = false;
  std::optional<Distance> d_max;
  for (const auto& [key, value] : j.items()) {
    const char* k = key.c_str();
    if (key == "mode") {
      const auto m = get_as<std::string>(value, k);
      if (m == "seal") {
        c.mode = Mode::seal;
      } else if (m == "gae") {
        c.mode = Mode::gae;
      } else {
        throw ConfigError("mode must be gae or seal, got '" + m + "'");
      }
    } else if (key == "scheme") {
      scheme_given = true;
      if (!value.is_null()) scheme_name = get_as<std::string>(value, k);
    } else if (key == "d_max") {
      if (!value.is_null()) d_max = static_cast<Distance>(get_count(value, k));
    } else if (key == "hops") {
      c.hops = get_count(value, k);
    } else if (key == "layers") {
      c.layers = get_count(value, k);
    } else if (key == "layer_kind") {
      try {
        c.layer_kind = parse_layer_kind(get_as<std::string>(value, k));
      } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
      }
    } else if (key == "hidden_dim") {
      c.hidden_dim = get_count(value, k);
    } else if (key == "embed_dim") {
      c.embed_dim = get_count(value, k);
    } else if (key == "readout") {
      try {
        c.readout = parse_readout(get_as<std::string>(value, k));
      } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
      }
    } else if (key == "epochs") {
      c.epochs = get_count(value, k);
    } else if (key == "learning_rate") {
      c.learning_rate = get_real(value, k);
    } else if (key == "batch_size") {
      c.batch_size = get_count(value, k);
    } else if (key == "neg_per_pos") {
      c.neg_per_pos = get_count(value, k);
    } else if (key == "train_fraction") {
      c.train_fraction = get_real(value, k);
    } else if (key == "metric") {
      c.metric = MetricSpec::parse(get_as<std::string>(value, k));
    } else if (key == "seed") {
      c.seed = get_count(value, k);
    } else if (key == "workers") {
      c.workers = get_count(value, k);
    } else if (key == "optimizer") {
      const auto o = get_as<std::string>(value, k);
      if (o == "momentum") {
        c.optimizer = OptimizerKind::momentum;
      } else if (o == "adam") {
        c.optimizer = OptimizerKind::adam;
      } else {
        throw ConfigError("optimizer must be momentum or adam, got '" + o + "'");
      }
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  if (c.mode == Mode::gae) {
    if (scheme_name) throw ConfigError("gae mode takes no labeling scheme");
    if (d_max) throw ConfigError("d_max given without a labeling scheme");
    c.scheme.reset();
  } else if (scheme_given && !scheme_name) {
    throw ConfigError("seal mode requires a labeling scheme");
  } else if (scheme_name) {
    try {
      c.scheme = parse_scheme(*scheme_name, d_max);
    } catch (const InvalidArgument& e) {
      throw ConfigError(e.what());
    }
  } else if (d_max) {
    c.scheme->d_max = d_max;
  }
  c.check();
  return c;
}

ExperimentConfig ExperimentConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return from_json(j);
}

json ExperimentConfig::to_json() const {
  json j;
  j["mode"] = mode == Mode::seal ? "seal" : "gae";
  j["scheme"] = scheme ? json(scheme->name()) : json(nullptr);
  j["d_max"] = scheme && scheme->d_max ? json(*scheme->d_max) : json(nullptr);
  j["hops"] = hops;
  j["layers"] = layers;
  j["layer_kind"] = labtrick::to_string(layer_kind);
  j["hidden_dim"] = hidden_dim;
  j["embed_dim"] = embed_dim;
  j["readout"] = labtrick::to_string(readout);
  j["epochs"] = epochs;
  j["learning_rate"] = learning_rate;
  j["batch_size"] = batch_size;
  j["neg_per_pos"] = neg_per_pos;
  j["train_fraction"] = train_fraction;
  j["metric"] = metric.to_string();
  j["seed"] = seed;
  j["workers"] = workers;
  j["optimizer"] = optimizer_name(optimizer);
  return j;
}

void ExperimentConfig::check() const {
  if (layers == 0) throw ConfigError("layers must be at least 1");
  if (hidden_dim == 0 || embed_dim == 0) throw ConfigError("hidden_dim and embed_dim must be at least 1");
  if (batch_size == 0) throw ConfigError("batch_size must be at least 1");
  if (neg_per_pos == 0) throw ConfigError("neg_per_pos must be at least 1");
  if (workers == 0) throw ConfigError("workers must be at least 1");
  if (!(learning_rate > 0) || !std::isfinite(learning_rate)) throw ConfigError("learning_rate must be positive");
  if (!(train_fraction > 0 && train_fraction <= 1)) throw ConfigError("train_fraction must lie in (0, 1]");
  if (readout.kind == ReadoutKind::sortpool && readout.k == 0) throw ConfigError("sortpool k must be at least 1");
  if (mode == Mode::gae) {
    if (scheme) throw ConfigError("gae mode takes no labeling scheme");
    if (readout.kind != ReadoutKind::center_hadamard && readout.kind != ReadoutKind::center_concat) {
      throw ConfigError("gae mode needs a center readout");
    }
  } else {
    if (!scheme) throw ConfigError("seal mode requires a labeling scheme");
    try {
      scheme->check();
    } catch (const InvalidArgument& e) {
      throw ConfigError(e.what());
    }
    if (scheme->kind == SchemeKind::all_one) throw ConfigError("all-one is not a labeling trick");
  }
}

TrainConfig ExperimentConfig::train_config() const {
  TrainConfig t;
  t.epochs = epochs;
  t.learning_rate = learning_rate;
  t.batch_size = batch_size;
  t.optimizer = optimizer;
  t.seed = derive_seed(seed, 1);
  return t;
}

// --- datasets ------------------------------------------------------------------

Graph Dataset::train_graph() const { return graph_from_edge_subset(full.num_nodes(), split.train, &full); }

Dataset make_dataset(EdgeListGraph parsed, SplitRatios ratios, std::size_t neg_per_pos, std::uint64_t seed) {
  Dataset d;
  d.split = split_edges(parsed.graph, ratios, neg_per_pos, seed);
  d.full = std::move(parsed.graph);
  d.original_ids = std::move(parsed.original_ids);
  d.ingest = parsed.report;
  return d;
}

namespace {

void write_edges_file(const std::filesystem::path& path, std::span<const Edge> edges,
                      std::span<const std::uint64_t> ids) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  write_edge_list(out, edges, ids);
}

std::vector<Edge> read_edges_file(const std::filesystem::path& path,
                                  const std::unordered_map<std::uint64_t, NodeId>& local) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<Edge> edges;
  for (auto [a, b] : read_edge_pairs(in)) {
    auto ia = local.find(a), ib = local.find(b);
    if (ia == local.end() || ib == local.end()) {
      throw ParseError(0, path.filename().string() + ": node id not listed in nodes.txt");
    }
    edges.emplace_back(ia->second, ib->second);
  }
  return edges;
}

}  // namespace

void write_split_dir(const std::filesystem::path& dir, const Dataset& data) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "nodes.txt");
    if (!out) throw Error("cannot write " + (dir / "nodes.txt").string());
    for (auto id : data.original_ids) out << id << '\n';
  }
  write_edges_file(dir / "train.edges", data.split.train, data.original_ids);
  write_edges_file(dir / "valid.edges", data.split.valid, data.original_ids);
  write_edges_file(dir / "test.edges", data.split.test, data.original_ids);
  write_edges_file(dir / "valid.neg", data.split.valid_negatives, data.original_ids);
  write_edges_file(dir / "test.neg", data.split.test_negatives, data.original_ids);
  if (data.full.feature_dim() > 0) {
    std::ofstream out(dir / "features.csv");
    out.precision(17);
    const auto& f = data.full.features();
    for (std::size_t r = 0; r < f.rows(); ++r) {
      for (std::size_t c = 0; c < f.cols(); ++c) out << (c ? "," : "") << f(r, c);
      out << '\n';
    }
  }
}

Dataset read_split_dir(const std::filesystem::path& dir) {
  Dataset d;
  std::unordered_map<std::uint64_t, NodeId> local;
  {
    std::ifstream in(dir / "nodes.txt");
    if (!in) throw Error("cannot open " + (dir / "nodes.txt").string());
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      std::istringstream ls(line);
      std::uint64_t id;
      if (!(ls >> id)) throw ParseError(line_no, "nodes.txt: expected a node id");
      if (!local.emplace(id, static_cast<NodeId>(d.original_ids.size())).second) {
        throw ParseError(line_no, "nodes.txt: duplicate node id");
      }
      d.original_ids.push_back(id);
    }
  }
  d.split.train = read_edges_file(dir / "train.edges", local);
  d.split.valid = read_edges_file(dir / "valid.edges", local);
  d.split.test = read_edges_file(dir / "test.edges", local);
  d.split.valid_negatives = read_edges_file(dir / "valid.neg", local);
  d.split.test_negatives = read_edges_file(dir / "test.neg", local);
  std::vector<Edge> all(d.split.train);
  all.insert(all.end(), d.split.valid.begin(), d.split.valid.end());
  all.insert(all.end(), d.split.test.begin(), d.split.test.end());
  d.full = Graph::from_edges(d.original_ids.size(), all);
  d.ingest.edges_read = all.size();
  if (std::filesystem::exists(dir / "features.csv")) {
    std::ifstream in(dir / "features.csv");
    d.full = d.full.with_features(parse_feature_csv(in));
  }
  return d;
}

// --- evaluation ------------------------------------------------------------------

EvalSet make_eval_set(const MetricSpec& metric, const Graph& full, std::span<const Edge> positives,
                      std::span<const Edge> split_negatives, std::uint64_t seed) {
  EvalSet set;
  set.positives.assign(positives.begin(), positives.end());
  if (metric.kind == MetricSpec::Kind::hits) {
    set.negatives.assign(split_negatives.begin(), split_negatives.end());
    return set;
  }
  const std::size_t n = full.num_nodes();
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<NodeId> pick(0, static_cast<NodeId>(n - 1));
  for (auto [u, v] : positives) {
    if (n - 1 - full.degree(u) < metric.value) {
      throw CapacityError("source " + std::to_string(u) + " has fewer than " + std::to_string(metric.value) +
                          " non-neighbors");
    }
    std::set<NodeId> chosen;
    std::vector<NodeId> order;
    while (order.size() < metric.value) {
      const NodeId x = pick(rng);
      if (x == u || full.has_edge(u, x) || !chosen.insert(x).second) continue;
      order.push_back(x);
    }
    for (NodeId x : order) set.negatives.emplace_back(u, x);
  }
  return set;
}

double evaluate_metric(const MetricSpec& metric, std::span<const double> pos_scores,
                       std::span<const double> neg_scores) {
  if (metric.kind == MetricSpec::Kind::hits) return hits_at_k(pos_scores, neg_scores, metric.value);
  if (neg_scores.size() != pos_scores.size() * metric.value) throw DimensionError("mrr needs N negatives per positive");
  std::vector<RankGroup> groups(pos_scores.size());
  for (std::size_t i = 0; i < pos_scores.size(); ++i) {
    groups[i].true_score = pos_scores[i];
    auto first = neg_scores.begin() + static_cast<std::ptrdiff_t>(i * metric.value);
    groups[i].negative_scores.assign(first, first + static_cast<std::ptrdiff_t>(metric.value));
  }
  return mrr(groups);
}

LabeledGraph prepare_link(const ExperimentConfig& config, const Graph& mp_graph, Edge link) {
  if (!config.scheme) throw ConfigError("seal scoring needs a labeling scheme");
  auto sg = extract_enclosing_subgraph(mp_graph, TargetSet{link.first, link.second}, config.hops,
                                       ExtractOptions{.remove_target_link = true});
  return make_labeled(sg, *config.scheme);
}

namespace {

std::vector<LabeledGraph> prepare_links(const ExperimentConfig& config, const Graph& mp_graph,
                                        std::span<const Edge> links) {
  std::vector<LabeledGraph> out(links.size());
  parallel_for(links.size(), config.workers, [&](std::size_t i) { out[i] = prepare_link(config, mp_graph, links[i]); });
  return out;
}

std::vector<double> score_prepared(const Model& model, const std::vector<LabeledGraph>& inputs, std::size_t workers) {
  std::vector<double> out(inputs.size());
  parallel_for(inputs.size(), workers, [&](std::size_t i) { out[i] = score(model, inputs[i]); });
  return out;
}

template <typename Fn>
auto in_stage(const char* stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(stage, e.what());
  }
}

std::uint32_t label_rows_needed(const std::vector<LabeledGraph>& inputs, bool& has_unreachable) {
  std::uint32_t top = 0;
  for (const auto& in : inputs) {
    top = std::max(top, in.labels.max_finite_code());
    const auto& v = in.labels.values();
    if (std::find(v.begin(), v.end(), kUnreachableCode) != v.end()) has_unreachable = true;
  }
  return top;
}

// Training negatives: uniform non-edges of the message-passing graph.
std::vector<Edge> sample_train_negatives(const Graph& g, std::size_t count, std::uint64_t seed) {
  const std::size_t n = g.num_nodes();
  const std::size_t capacity = n * (n - 1) / 2 - g.num_edges();
  if (count > capacity) throw CapacityError("not enough non-edges for training negatives");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<NodeId> pick(0, static_cast<NodeId>(n - 1));
  std::unordered_set<std::uint64_t> seen;
  std::vector<Edge> out;
  while (out.size() < count) {
    NodeId u = pick(rng), v = pick(rng);
    if (u == v || g.has_edge(u, v) || !seen.insert(edge_key(u, v)).second) continue;
    out.emplace_back(u, v);
  }
  return out;
}

struct Prepared {
  EvalSet valid;
  EvalSet test;
};

Prepared eval_sets(const ExperimentConfig& config, const Dataset& data) {
  return {make_eval_set(config.metric, data.full, data.split.valid, data.split.valid_negatives, derive_seed(config.seed, 2)),
          make_eval_set(config.metric, data.full, data.split.test, data.split.test_negatives, derive_seed(config.seed, 3))};
}

ModelSpec model_spec(const ExperimentConfig& config, std::size_t embedding_rows, std::size_t feature_dim) {
  return ModelSpec::stack(embedding_rows, config.embed_dim, feature_dim, config.layer_kind, config.layers,
                          config.hidden_dim, config.readout, config.hidden_dim);
}

void check_metric(const char* split, double v) {
  if (!std::isfinite(v) || v < 0 || v > 1) throw NumericError(0, std::string(split) + " metric out of range");
}

}  // namespace

std::vector<double> score_links(const ExperimentConfig& config, const Model& model, const Graph& mp_graph,
                                std::span<const Edge> links) {
  if (config.mode == Mode::gae) return score_pairs_whole_graph(model, mp_graph, links);
  return score_prepared(model, prepare_links(config, mp_graph, links), config.workers);
}

ExperimentResult run_experiment(const ExperimentConfig& config, const Dataset& data) {
  config.check();
  const auto started = std::chrono::steady_clock::now();
  const Graph mp = data.train_graph();

  if (data.split.train.empty()) throw StageError("split", "no training edges");
  const std::size_t n_pos = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(config.train_fraction * static_cast<double>(data.split.train.size()))));
  std::vector<Edge> train_links(data.split.train.begin(), data.split.train.begin() + static_cast<std::ptrdiff_t>(std::min(n_pos, data.split.train.size())));
  const std::size_t positives = train_links.size();
  auto negs = in_stage("sample", [&] { return sample_train_negatives(mp, positives * config.neg_per_pos, derive_seed(config.seed, 4)); });
  train_links.insert(train_links.end(), negs.begin(), negs.end());
  std::vector<double> targets(train_links.size(), 0.0);
  std::fill(targets.begin(), targets.begin() + static_cast<std::ptrdiff_t>(positives), 1.0);

  const Prepared sets = in_stage("sample", [&] { return eval_sets(config, data); });

  std::unique_ptr<Objective> objective;
  std::vector<LabeledGraph> valid_pos, valid_neg, test_pos, test_neg;
  std::size_t rows = 1;
  if (config.mode == Mode::seal) {
    std::vector<LabeledGraph> train_inputs;
    in_stage("label", [&] {
      train_inputs = prepare_links(config, mp, train_links);
      valid_pos = prepare_links(config, mp, sets.valid.positives);
      valid_neg = prepare_links(config, mp, sets.valid.negatives);
      test_pos = prepare_links(config, mp, sets.test.positives);
      test_neg = prepare_links(config, mp, sets.test.negatives);
    });
    bool unreachable = false;
    std::uint32_t top = 0;
    for (const auto* group : {&train_inputs, &valid_pos, &valid_neg, &test_pos, &test_neg}) {
      top = std::max(top, label_rows_needed(*group, unreachable));
    }
    rows = std::max<std::size_t>(2, std::size_t{top} + 1) + (unreachable ? 1 : 0);
    std::vector<Example> examples;
    examples.reserve(train_inputs.size());
    for (std::size_t i = 0; i < train_inputs.size(); ++i) examples.push_back({std::move(train_inputs[i]), targets[i]});
    objective = std::make_unique<SubgraphObjective>(std::move(examples));
  } else {
    objective = std::make_unique<WholeGraphObjective>(mp, train_links, targets);
  }

  Model initial = in_stage("init", [&] { return Model::initialize(model_spec(config, rows, mp.feature_dim()), config.seed); });

  auto metric_of = [&](const Model& m, const EvalSet& set, const std::vector<LabeledGraph>& pos,
                       const std::vector<LabeledGraph>& neg) {
    std::vector<double> ps, ns;
    if (config.mode == Mode::seal) {
      ps = score_prepared(m, pos, config.workers);
      ns = score_prepared(m, neg, config.workers);
    } else {
      ps = score_pairs_whole_graph(m, mp, set.positives);
      ns = score_pairs_whole_graph(m, mp, set.negatives);
    }
    return evaluate_metric(config.metric, ps, ns);
  };

  TrainResult trained = in_stage("train", [&] {
    return train(config.train_config(), std::move(initial), *objective,
                 [&](const Model& m) { return metric_of(m, sets.valid, valid_pos, valid_neg); });
  });

  const double valid_metric = in_stage("eval", [&] { return metric_of(trained.model, sets.valid, valid_pos, valid_neg); });
  const double test_metric = in_stage("eval", [&] { return metric_of(trained.model, sets.test, test_pos, test_neg); });
  check_metric("valid", valid_metric);
  check_metric("test", test_metric);

  json report;
  report["config"] = config.to_json();
  report["ingest"] = {{"num_nodes", data.full.num_nodes()},
                      {"num_edges", data.full.num_edges()},
                      {"feature_dim", data.full.feature_dim()},
                      {"edges_read", data.ingest.edges_read},
                      {"self_loops_dropped", data.ingest.self_loops_dropped},
                      {"duplicates_dropped", data.ingest.duplicates_dropped}};
  report["split"] = {{"train", data.split.train.size()},
                     {"valid", data.split.valid.size()},
                     {"test", data.split.test.size()},
                     {"train_positives_used", positives},
                     {"train_negatives", negs.size()}};
  report["metrics"] = {{"metric", config.metric.to_string()}, {"valid", valid_metric}, {"test", test_metric}};
  report["training"] = {{"initial_loss", trained.initial_loss},
                        {"final_loss", trained.final_loss},
                        {"epoch_losses", trained.epoch_losses},
                        {"best_epoch", trained.best_epoch},
                        {"best_valid", trained.best_score},
                        {"embedding_rows", rows},
                        {"parameters", trained.model.num_scalars()}};
  report["wall_clock_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return {std::move(trained.model), std::move(report)};
}

json evaluate_model(const ExperimentConfig& config, const Model& model, const Dataset& data) {
  config.check();
  const Graph mp = data.train_graph();
  const Prepared sets = in_stage("sample", [&] { return eval_sets(config, data); });
  json out;
  out["metric"] = config.metric.to_string();
  for (auto [name, set] : {std::pair{"valid", &sets.valid}, std::pair{"test", &sets.test}}) {
    const double v = in_stage("eval", [&] {
      return evaluate_metric(config.metric, score_links(config, model, mp, set->positives),
                             score_links(config, model, mp, set->negatives));
    });
    check_metric(name, v);
    out[name] = v;
  }
  return out;
}

}  // namespace labtrick
