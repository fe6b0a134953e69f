#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "labtrick/errors.hpp"
#include "labtrick/graph.hpp"
#include "labtrick/heuristics.hpp"
#include "labtrick/labeling.hpp"
#include "labtrick/metrics.hpp"
#include "labtrick/model.hpp"
#include "labtrick/pipeline.hpp"
#include "labtrick/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace labtrick;

namespace {

constexpr int kVerificationFailed = 1;
constexpr int kUsage = 2;

void emit_text(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw Error("cannot write " + out_path);
  out << text;
}

void emit(const json& report, const std::string& out_path) { emit_text(report.dump(2) + "\n", out_path); }

EdgeListGraph load_graph(const std::string& edges, const std::string& features) {
  std::ifstream in(edges);
  if (!in) throw Error("cannot open " + edges);
  EdgeListGraph parsed = parse_edge_list(in);
  if (!features.empty()) {
    std::ifstream fin(features);
    if (!fin) throw Error("cannot open " + features);
    DenseMatrix by_original = parse_feature_csv(fin);
    // rows are indexed by original node id
    DenseMatrix local(parsed.graph.num_nodes(), by_original.cols());
    for (std::size_t i = 0; i < parsed.original_ids.size(); ++i) {
      const auto id = parsed.original_ids[i];
      if (id >= by_original.rows()) throw ParseError(0, "no feature row for node " + std::to_string(id));
      for (std::size_t c = 0; c < by_original.cols(); ++c) local(i, c) = by_original(id, c);
    }
    parsed.graph = parsed.graph.with_features(std::move(local));
  }
  return parsed;
}

json ingest_json(const EdgeListGraph& p) {
  const Graph& g = p.graph;
  std::size_t min_deg = g.num_nodes() ? std::numeric_limits<std::size_t>::max() : 0, max_deg = 0;
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    min_deg = std::min(min_deg, g.degree(v));
    max_deg = std::max(max_deg, g.degree(v));
  }
  return {{"num_nodes", g.num_nodes()},
          {"num_edges", g.num_edges()},
          {"feature_dim", g.feature_dim()},
          {"lines", p.report.lines},
          {"comment_lines", p.report.comment_lines},
          {"edges_read", p.report.edges_read},
          {"self_loops_dropped", p.report.self_loops_dropped},
          {"duplicates_dropped", p.report.duplicates_dropped},
          {"degree", {{"min", min_deg},
                      {"max", max_deg},
                      {"mean", g.num_nodes() ? 2.0 * static_cast<double>(g.num_edges()) / static_cast<double>(g.num_nodes()) : 0.0}}}};
}

std::vector<double> parse_reals(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw InvalidArgument("not a number: '" + item + "'");
    }
  }
  return out;
}

std::pair<std::uint64_t, std::uint64_t> parse_link(const std::string& s) {
  const auto comma = s.find(',');
  if (comma == std::string::npos) throw InvalidArgument("--link expects u,v");
  try {
    std::size_t a = 0, b = 0;
    const std::string left = s.substr(0, comma), right = s.substr(comma + 1);
    const auto u = std::stoull(left, &a);
    const auto v = std::stoull(right, &b);
    if (a != left.size() || b != right.size()) throw std::invalid_argument(s);
    return {u, v};
  } catch (const std::exception&) {
    throw InvalidArgument("--link expects two node ids, got '" + s + "'");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Labeling-trick link prediction toolkit"};
  app.require_subcommand(1);
  std::string out_path;

  // ingest
  std::string edges_path, features_path;
  auto* ingest = app.add_subcommand("ingest", "Parse an edge list and report graph statistics");
  ingest->add_option("edges", edges_path, "Edge-list file")->required();
  ingest->add_option("--features", features_path, "Node feature CSV (row = original node id)");
  ingest->add_option("--out", out_path, "Write the report here instead of stdout");

  // split
  std::string ratios = "0.8,0.1,0.1", split_dir;
  std::size_t neg = 1;
  std::uint64_t seed = 1;
  auto* split = app.add_subcommand("split", "Split edges into train/valid/test with sampled negatives");
  split->add_option("edges", edges_path, "Edge-list file")->required();
  split->add_option("--features", features_path, "Node feature CSV (row = original node id)");
  split->add_option("--ratios", ratios, "train,valid,test fractions")->capture_default_str();
  split->add_option("--neg", neg, "Negatives per evaluation positive")->capture_default_str();
  split->add_option("--seed", seed, "Split seed")->capture_default_str();
  split->add_option("--dir", split_dir, "Output directory")->required();
  split->add_option("--out", out_path, "Write the report here instead of stdout");

  // label
  std::string scheme_name, link;
  std::optional<Distance> d_max;
  std::size_t hops = 1;
  auto* label = app.add_subcommand("label", "Label the enclosing subgraph of one link (TSV)");
  label->add_option("edges", edges_path, "Edge-list file")->required();
  label->add_option("--scheme", scheme_name, "zo, drnl, de or de+")->required();
  label->add_option("--dmax", d_max, "Distance cap for de/de+");
  label->add_option("--hops", hops, "Enclosing subgraph radius")->capture_default_str();
  label->add_option("--link", link, "Target link u,v in original ids")->required();
  label->add_option("--out", out_path, "Write the TSV here instead of stdout");

  // train
  std::string config_path, data_dir, checkpoint_path;
  auto* trainc = app.add_subcommand("train", "Train a model on a split directory");
  trainc->add_option("--config", config_path, "Experiment config (JSON)")->required();
  trainc->add_option("--data", data_dir, "Split directory")->required();
  trainc->add_option("--checkpoint", checkpoint_path, "Save the selected model here");
  trainc->add_option("--out", out_path, "Write the report here instead of stdout");

  // eval
  std::string method = "model", metric_text;
  auto* eval = app.add_subcommand("eval", "Evaluate a model or heuristic on a split directory");
  eval->add_option("--method", method, "model, cn or aa")->check(CLI::IsMember({"model", "cn", "aa"}))->capture_default_str();
  eval->add_option("--metric", metric_text, "hits:K or mrr:N (defaults to the config's)");
  eval->add_option("--data", data_dir, "Split directory")->required();
  eval->add_option("--config", config_path, "Experiment config (model method)");
  eval->add_option("--checkpoint", checkpoint_path, "Model checkpoint (model method)");
  eval->add_option("--seed", seed, "Seed for mrr negatives (heuristics)")->capture_default_str();
  eval->add_option("--out", out_path, "Write the report here instead of stdout");

  // verify
  std::string level = "fast";
  std::size_t workers = 1;
  auto* verify = app.add_subcommand("verify", "Run the theory verification suite");
  verify->add_option("--level", level, "fast or exhaustive")->check(CLI::IsMember({"fast", "exhaustive"}))->capture_default_str();
  verify->add_option("--seed", seed, "Seed")->capture_default_str();
  verify->add_option("--workers", workers, "Worker threads")->capture_default_str();
  verify->add_option("--out", out_path, "Write the report here instead of stdout");

  // wl-bench
  WlBenchOptions bench;
  std::vector<std::size_t> sizes{16, 24, 32};
  auto* wlb = app.add_subcommand("wl-bench", "Count 1-WL-indistinguishable link pairs on random regular graphs");
  wlb->add_option("--degree", bench.degree, "Node degree")->capture_default_str();
  wlb->add_option("--sizes", sizes, "Graph sizes")->delimiter(',')->capture_default_str();
  wlb->add_option("--hops", bench.hops, "WL rounds")->capture_default_str();
  wlb->add_option("--seeds", bench.seeds, "Seeds per size")->capture_default_str();
  wlb->add_option("--seed", bench.base_seed, "Base seed")->capture_default_str();
  wlb->add_option("--workers", bench.workers, "Worker threads")->capture_default_str();
  wlb->add_option("--out", out_path, "Write the report here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  try {
    if (*ingest) {
      emit(ingest_json(load_graph(edges_path, features_path)), out_path);
    } else if (*split) {
      const auto r = parse_reals(ratios);
      if (r.size() != 3) throw InvalidArgument("--ratios expects three numbers");
      EdgeListGraph parsed = load_graph(edges_path, features_path);
      json ingest_report = ingest_json(parsed);
      Dataset data = make_dataset(std::move(parsed), SplitRatios{r[0], r[1], r[2]}, neg, seed);
      write_split_dir(split_dir, data);
      emit({{"ingest", ingest_report},
            {"dir", split_dir},
            {"seed", seed},
            {"train", data.split.train.size()},
            {"valid", data.split.valid.size()},
            {"test", data.split.test.size()},
            {"valid_negatives", data.split.valid_negatives.size()},
            {"test_negatives", data.split.test_negatives.size()}},
           out_path);
    } else if (*label) {
      const auto scheme = parse_scheme(scheme_name, d_max);
      scheme.check();
      EdgeListGraph parsed = load_graph(edges_path, "");
      const auto [a, b] = parse_link(link);
      std::unordered_map<std::uint64_t, NodeId> local;
      for (std::size_t i = 0; i < parsed.original_ids.size(); ++i) local.emplace(parsed.original_ids[i], static_cast<NodeId>(i));
      if (!local.contains(a) || !local.contains(b)) throw InvalidArgument("link endpoint not in the graph");
      const auto sg = extract_enclosing_subgraph(parsed.graph, TargetSet{local[a], local[b]}, hops,
                                                 ExtractOptions{.remove_target_link = true});
      const auto labels = apply_labeling(scheme, sg);
      std::string tsv = "original_node_id\tlabel\n";
      for (std::size_t i = 0; i < sg.parent_ids.size(); ++i) {
        tsv += std::to_string(parsed.original_ids[sg.parent_ids[i]]) + "\t" + labels.format(i) + "\n";
      }
      emit_text(tsv, out_path);
    } else if (*trainc) {
      const auto config = ExperimentConfig::from_file(config_path);
      const Dataset data = read_split_dir(data_dir);
      auto result = run_experiment(config, data);
      if (!checkpoint_path.empty()) {
        save_model_file(checkpoint_path, result.model);
        result.report["checkpoint"] = checkpoint_path;
      }
      emit(result.report, out_path);
    } else if (*eval) {
      const Dataset data = read_split_dir(data_dir);
      json report{{"method", method}, {"data", data_dir}};
      if (method == "model") {
        if (config_path.empty() || checkpoint_path.empty()) throw ConfigError("eval --method model needs --config and --checkpoint");
        auto config = ExperimentConfig::from_file(config_path);
        if (!metric_text.empty()) config.metric = MetricSpec::parse(metric_text);
        const Model model = load_model_file(checkpoint_path);
        report["metrics"] = evaluate_model(config, model, data);
      } else {
        const MetricSpec metric = MetricSpec::parse(metric_text.empty() ? "hits:20" : metric_text);
        const Graph mp = data.train_graph();
        const bool cn = method == "cn";
        auto scorer = [&](std::span<const Edge> links) {
          std::vector<double> s;
          s.reserve(links.size());
          for (auto [u, v] : links) s.push_back(cn ? static_cast<double>(common_neighbors(mp, u, v)) : adamic_adar(mp, u, v));
          return s;
        };
        json metrics{{"metric", metric.to_string()}};
        const std::pair<const char*, std::pair<const std::vector<Edge>*, const std::vector<Edge>*>> splits[] = {
            {"valid", {&data.split.valid, &data.split.valid_negatives}},
            {"test", {&data.split.test, &data.split.test_negatives}}};
        std::uint64_t stream = 0;
        for (const auto& [name, pn] : splits) {
          const auto set = make_eval_set(metric, data.full, *pn.first, *pn.second, seed + stream++);
          metrics[name] = evaluate_metric(metric, scorer(set.positives), scorer(set.negatives));
        }
        report["metrics"] = metrics;
      }
      emit(report, out_path);
    } else if (*verify) {
      const json report = verify_suite({parse_verify_level(level), seed, workers});
      emit(report, out_path);
      return report.at("pass").get<bool>() ? 0 : kVerificationFailed;
    } else if (*wlb) {
      bench.sizes = sizes;
      const json report = wl_bench(bench);
      emit(report, out_path);
      return report.at("pass").get<bool>() ? 0 : kVerificationFailed;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kUsage;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kUsage;
  } catch (const InvalidArgument& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return 0;
}
