#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

#include "labtrick/generators.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const fs::path& workdir() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / "labtrick_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int run(const std::string& args) {
  const std::string cmd = std::string(LABTRICK_CLI) + " " + args + " 2>" + (workdir() / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

fs::path random_edges_file() {
  const auto p = workdir() / "random.edges";
  if (!fs::exists(p)) {
    labtrick::Rng rng(4);
    const auto g = labtrick::random_gnp(40, 0.2, rng);
    std::ofstream out(p);
    for (auto [u, v] : g.edges()) out << (u + 100) << ' ' << (v + 100) << '\n';
  }
  return p;
}

}  // namespace

TEST_CASE("ingest reports cleaning") {
  const auto edges = workdir() / "fig.edges";
  write(edges, "# two-triangle\n10 11\n11 14\n10 14\n14 15\n15 12\n15 13\n12 13\n11 10\n13 13\n");
  const auto out = workdir() / "ingest.json";
  REQUIRE(run("ingest " + edges.string() + " --out " + out.string()) == 0);
  const auto r = json::parse(slurp(out));
  CHECK(r["num_nodes"] == 6);
  CHECK(r["num_edges"] == 7);
  CHECK(r["comment_lines"] == 1);
  CHECK(r["self_loops_dropped"] == 1);
  CHECK(r["duplicates_dropped"] == 1);
  CHECK(r["degree"]["max"] == 3);
}

TEST_CASE("label writes a tsv in original ids") {
  const auto edges = workdir() / "path.edges";
  write(edges, "7 8\n8 9\n9 20\n");
  const auto out = workdir() / "labels.tsv";
  REQUIRE(run("label " + edges.string() + " --scheme drnl --hops 1 --link 7,9 --out " + out.string()) == 0);
  CHECK(slurp(out) == "original_node_id\tlabel\n7\t1\n9\t1\n8\t2\n20\t0\n");
  REQUIRE(run("label " + edges.string() + " --scheme zo --hops 1 --link 7,9 --out " + out.string()) == 0);
  CHECK(slurp(out) == "original_node_id\tlabel\n7\t1\n9\t1\n8\t0\n20\t0\n");
  CHECK(run("label " + edges.string() + " --scheme drnl --link 7,99") == 2);
  CHECK(run("label " + edges.string() + " --scheme nope --link 7,9") == 2);
}

TEST_CASE("split, train and eval") {
  const auto dir = workdir() / "split";
  REQUIRE(run("split " + random_edges_file().string() + " --neg 2 --seed 3 --dir " + dir.string() + " --out " +
              (workdir() / "split.json").string()) == 0);
  const auto s = json::parse(slurp(workdir() / "split.json"));
  CHECK(s["valid_negatives"] == 2 * s["valid"].get<int>());
  for (const char* f : {"nodes.txt", "train.edges", "valid.edges", "test.edges", "valid.neg", "test.neg"}) {
    CHECK(fs::exists(dir / f));
  }

  const auto cfg = workdir() / "config.json";
  write(cfg, R"({"mode":"seal","scheme":"drnl","layers":2,"hidden_dim":8,"embed_dim":4,"epochs":2,"metric":"hits:5"})");
  const auto ckpt = workdir() / "model.bin";
  const auto report = workdir() / "train.json";
  REQUIRE(run("train --config " + cfg.string() + " --data " + dir.string() + " --checkpoint " + ckpt.string() +
              " --out " + report.string()) == 0);
  const auto t = json::parse(slurp(report));
  CHECK(fs::exists(ckpt));
  CHECK(t["training"]["epoch_losses"].size() == 2);

  const auto ev = workdir() / "eval.json";
  REQUIRE(run("eval --method model --config " + cfg.string() + " --checkpoint " + ckpt.string() + " --data " +
              dir.string() + " --out " + ev.string()) == 0);
  const auto e = json::parse(slurp(ev));
  CHECK(e["metrics"]["test"] == t["metrics"]["test"]);
  CHECK(e["metrics"]["valid"] == t["metrics"]["valid"]);

  for (const char* m : {"cn", "aa"}) {
    REQUIRE(run(std::string("eval --method ") + m + " --metric mrr:3 --data " + dir.string() + " --out " + ev.string()) == 0);
    const double v = json::parse(slurp(ev))["metrics"]["test"].get<double>();
    CHECK(v > 0);
    CHECK(v <= 1);
  }

  CHECK(run("eval --method model --data " + dir.string()) == 2);
  write(workdir() / "bad.json", R"({"mode":"gae","scheme":"drnl"})");
  CHECK(run("train --config " + (workdir() / "bad.json").string() + " --data " + dir.string()) == 2);
  write(workdir() / "unknown.json", R"({"epoch":3})");
  CHECK(run("train --config " + (workdir() / "unknown.json").string() + " --data " + dir.string()) == 2);
}

TEST_CASE("verification exit codes") {
  const auto out = workdir() / "verify.json";
  REQUIRE(run("verify --level fast --out " + out.string()) == 0);
  CHECK(json::parse(slurp(out))["pass"] == true);
  // K4 has no indistinguishable non-automorphic links
  CHECK(run("wl-bench --degree 3 --sizes 4 --seeds 2 --out " + out.string()) == 1);
  CHECK(json::parse(slurp(out))["pass"] == false);
}

TEST_CASE("usage errors") {
  CHECK(run("") == 2);
  CHECK(run("frobnicate") == 2);
  CHECK(run("ingest") == 2);
  CHECK(run("ingest /nonexistent/file.edges") == 2);
  CHECK(run("verify --level slow") == 2);
  CHECK(run("--help >/dev/null") == 0);
  write(workdir() / "garbage.edges", "1 2\nthree four\n");
  CHECK(run("ingest " + (workdir() / "garbage.edges").string()) == 2);
}
