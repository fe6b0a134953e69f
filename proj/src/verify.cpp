#include "labtrick/verify.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>

#include "labtrick/errors.hpp"
#include "labtrick/generators.hpp"
#include "labtrick/labeling.hpp"
#include "labtrick/parallel.hpp"
#include "labtrick/wl.hpp"

namespace labtrick {

using nlohmann::json;

VerifyLevel parse_verify_level(const std::string& s) {
  if (s == "fast") return VerifyLevel::fast;
  if (s == "exhaustive") return VerifyLevel::exhaustive;
  throw InvalidArgument("level must be fast or exhaustive, got '" + s + "'");
}

std::vector<std::vector<std::uint32_t>> drnl_enumeration_table(std::size_t max_sum) {
  std::vector<std::vector<std::uint32_t>> table(max_sum + 1, std::vector<std::uint32_t>(max_sum + 1, 0));
  std::uint32_t next = 2;
  for (std::size_t d = 2; d <= max_sum; ++d) {
    for (std::size_t lo = 1; lo <= d / 2; ++lo) {
      table[lo][d - lo] = next;
      table[d - lo][lo] = next;
      ++next;
    }
  }
  return table;
}

namespace {

double seconds_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

json check_drnl() {
  const auto start = std::chrono::steady_clock::now();
  constexpr std::size_t kMaxSum = 100;
  const auto table = drnl_enumeration_table(kMaxSum);
  std::size_t mismatches = 0, compared = 0;
  for (std::size_t dx = 1; dx < kMaxSum; ++dx) {
    for (std::size_t dy = 1; dx + dy <= kMaxSum; ++dy) {
      ++compared;
      if (drnl_hash(static_cast<Distance>(dx), static_cast<Distance>(dy)) != table[dx][dy]) ++mismatches;
    }
  }
  const bool spots = drnl_hash(1, 1) == 2 && drnl_hash(2, 2) == 5 && drnl_hash(2, 3) == 7;
  return {{"pairs_compared", compared},
          {"mismatches", mismatches},
          {"spot_values_ok", spots},
          {"seconds", seconds_since(start)},
          {"pass", mismatches == 0 && spots}};
}

std::vector<LinkItem> corpus_for(const SuiteOptions& o) {
  if (o.level == VerifyLevel::exhaustive) return exhaustive_link_corpus(5);
  return sampled_link_corpus(400, 2, 7, 0.4, o.seed);
}

json counterexamples_json(const std::vector<ValidityCounterexample>& cs) {
  json out = json::array();
  for (const auto& c : cs) out.push_back({{"item", c.item}, {"other", c.other}, {"condition", c.condition}, {"detail", c.detail}});
  return out;
}

json check_validity(const SuiteOptions& o, const std::vector<LinkItem>& corpus) {
  const auto start = std::chrono::steady_clock::now();
  const std::size_t trials = o.level == VerifyLevel::exhaustive ? 100 : 20;
  const std::vector<LabelingScheme> schemes{LabelingScheme::zero_one(), LabelingScheme::drnl(), LabelingScheme::de(),
                                            LabelingScheme::de_plus(), LabelingScheme::all_one()};
  std::vector<ValidityReport> reports(schemes.size());
  parallel_for(schemes.size(), o.workers, [&](std::size_t i) {
    reports[i] = validate_labeling_scheme(schemes[i], corpus, trials, o.seed + i);
  });
  json out;
  bool pass = true;
  for (std::size_t i = 0; i < schemes.size(); ++i) {
    const auto& r = reports[i];
    const bool expected = schemes[i].valid_by_design() ? r.valid() : !r.condition1_holds();
    pass = pass && expected;
    out["schemes"][schemes[i].name()] = {{"items", r.items},
                                         {"permutation_trials", r.permutation_trials},
                                         {"equivariance_violations", r.equivariance_violations},
                                         {"disjointness_violations", r.disjointness_violations},
                                         {"target_mapping_violations", r.target_mapping_violations},
                                         {"condition1", r.condition1_holds()},
                                         {"condition2", r.condition2_holds()},
                                         {"valid", r.valid()},
                                         {"expected_valid", schemes[i].valid_by_design()},
                                         {"counterexamples", counterexamples_json(r.counterexamples)}};
  }
  out["seconds"] = seconds_since(start);
  out["pass"] = pass;
  return out;
}

json check_structural(const SuiteOptions& o, const std::vector<LinkItem>& corpus) {
  const auto start = std::chrono::steady_clock::now();
  json out;
  bool pass = true;
  for (const auto& scheme : {LabelingScheme::drnl(), LabelingScheme::zero_one(), LabelingScheme::all_one()}) {
    const auto r = verify_structural_link_repr(corpus, scheme, std::nullopt, o.workers);
    const bool expected = scheme.valid_by_design() ? r.violations == 0 : r.violations > 0;
    pass = pass && expected;
    json examples = json::array();
    for (const auto& e : r.examples) examples.push_back({{"first", e.first}, {"second", e.second}, {"kind", e.kind}});
    out["schemes"][scheme.name()] = {{"items", r.items},
                                     {"isomorphism_classes", r.isomorphism_classes},
                                     {"code_classes", r.code_classes},
                                     {"violations", r.violations},
                                     {"expected_violations", !scheme.valid_by_design()},
                                     {"examples", examples}};
  }
  out["seconds"] = seconds_since(start);
  out["pass"] = pass;
  return out;
}

json check_two_triangles() {
  const auto f = two_triangle_graph();
  ColorTable table;
  const TargetSet a{f.v1, f.v2}, b{f.v1, f.v3}, c{f.v4, f.v3};
  const std::optional<LabelingScheme> none;
  const std::optional<LabelingScheme> zo = LabelingScheme::zero_one();
  const bool unlabeled_same = wl_link_code(table, f.graph, a, none, 3) == wl_link_code(table, f.graph, b, none, 3);
  bool labeled_differ = true;
  for (std::size_t rounds = 2; rounds <= 4; ++rounds) {
    labeled_differ = labeled_differ && wl_link_code(table, f.graph, a, zo, rounds) != wl_link_code(table, f.graph, b, zo, rounds);
  }
  const bool symmetric_unlabeled = wl_link_code(table, f.graph, a, none, 3) == wl_link_code(table, f.graph, c, none, 3);
  const bool symmetric_labeled = wl_link_code(table, f.graph, a, zo, 3) == wl_link_code(table, f.graph, c, zo, 3);
  return {{"unlabeled_v1v2_equals_v1v3", unlabeled_same},
          {"zero_one_v1v2_differs_v1v3", labeled_differ},
          {"v1v2_equals_v4v3_unlabeled", symmetric_unlabeled},
          {"v1v2_equals_v4v3_zero_one", symmetric_labeled},
          {"pass", unlabeled_same && labeled_differ && symmetric_unlabeled && symmetric_labeled}};
}

bool refines(const std::vector<std::uint32_t>& coarse, const std::vector<std::uint32_t>& fine) {
  // fine color determines coarse color
  std::vector<std::uint32_t> seen(fine.size(), UINT32_MAX);
  for (std::size_t i = 0; i < fine.size(); ++i) {
    auto& s = seen.at(fine[i]);
    if (s == UINT32_MAX) {
      s = coarse[i];
    } else if (s != coarse[i]) {
      return false;
    }
  }
  return true;
}

json check_paths(const SuiteOptions& o) {
  const auto start = std::chrono::steady_clock::now();
  json failures = json::array();
  for (std::size_t n = 2; n <= 50; ++n) {
    const Graph p = path_graph(n);
    std::vector<Color> init(n, 0);
    const auto trace = wl_refine(p, init, n);
    if (!trace.converged || trace.converged_at != (n + 1) / 2) {
      failures.push_back({{"n", n}, {"converged_at", trace.converged_at}, {"expected", (n + 1) / 2}});
    }
  }
  constexpr std::size_t graphs = 1000;
  Rng rng(o.seed);
  std::size_t bound_failures = 0, monotone_failures = 0;
  for (std::size_t i = 0; i < graphs; ++i) {
    std::uniform_int_distribution<std::size_t> size(1, 40);
    std::uniform_real_distribution<double> prob(0.02, 0.5);
    const std::size_t n = size(rng);
    const Graph g = random_gnp(n, prob(rng), rng);
    std::vector<Color> init(n, 0);
    const auto trace = wl_refine(g, init, n + 1);
    if (!trace.converged || trace.converged_at > n - 1) ++bound_failures;
    for (std::size_t t = 1; t < trace.rounds.size(); ++t) {
      if (!refines(trace.rounds[t - 1], trace.rounds[t])) {
        ++monotone_failures;
        break;
      }
    }
  }
  return {{"path_failures", failures},
          {"random_graphs", graphs},
          {"bound_failures", bound_failures},
          {"monotonicity_failures", monotone_failures},
          {"seconds", seconds_since(start)},
          {"pass", failures.empty() && bound_failures == 0 && monotone_failures == 0}};
}

}  // namespace

json wl_bench(const WlBenchOptions& o) {
  if (o.hops == 0) throw InvalidArgument("hops must be at least 1");
  if (o.seeds == 0) throw InvalidArgument("seeds must be at least 1");
  const auto start = std::chrono::steady_clock::now();
  json sizes = json::array();
  bool pass = true;
  for (std::size_t n : o.sizes) {
    std::vector<std::size_t> counts(o.seeds);
    std::vector<std::size_t> failed(o.seeds);
    std::vector<double> mean_degree(o.seeds);
    parallel_for(o.seeds, o.workers, [&](std::size_t s) {
      Rng rng(o.base_seed * 1000003ULL + n * 7919ULL + s);
      const Graph g = random_regular(n, o.degree, rng);
      mean_degree[s] = n ? 2.0 * static_cast<double>(g.num_edges()) / static_cast<double>(n) : 0.0;
      const auto pairs = find_indistinguishable_link_pairs(g, o.hops);
      counts[s] = pairs.size();
      for (const auto& p : pairs) {
        if (!check_indistinguishable_pair(g, o.hops, p).all()) ++failed[s];
      }
    });
    const std::size_t nonempty = static_cast<std::size_t>(std::count_if(counts.begin(), counts.end(), [](auto c) { return c > 0; }));
    const std::size_t total_failed = std::accumulate(failed.begin(), failed.end(), std::size_t{0});
    const double fraction = static_cast<double>(nonempty) / static_cast<double>(o.seeds);
    const double mean = static_cast<double>(std::accumulate(counts.begin(), counts.end(), std::size_t{0})) /
                        static_cast<double>(o.seeds);
    const bool ok = fraction >= 0.9 && total_failed == 0;
    pass = pass && ok;
    sizes.push_back({{"n", n},
                     {"seeds", o.seeds},
                     {"seeds_with_pairs", nonempty},
                     {"fraction_with_pairs", fraction},
                     {"mean_pairs", mean},
                     {"pair_counts", counts},
                     {"self_check_failures", total_failed},
                     {"mean_degree", std::accumulate(mean_degree.begin(), mean_degree.end(), 0.0) / static_cast<double>(o.seeds)},
                     {"pass", ok}});
  }
  return {{"degree", o.degree},
          {"hops", o.hops},
          {"sizes", sizes},
          {"seconds", seconds_since(start)},
          {"pass", pass}};
}

json verify_suite(const SuiteOptions& o) {
  const auto start = std::chrono::steady_clock::now();
  const auto corpus = corpus_for(o);
  json checks;
  checks["drnl_hash"] = check_drnl();
  checks["labeling_validity"] = check_validity(o, corpus);
  checks["structural_equivalence"] = check_structural(o, corpus);
  checks["two_triangles"] = check_two_triangles();
  checks["wl_convergence"] = check_paths(o);
  WlBenchOptions bench;
  bench.seeds = o.level == VerifyLevel::exhaustive ? 20 : 5;
  bench.base_seed = o.seed;
  bench.workers = o.workers;
  checks["indistinguishable_pairs"] = wl_bench(bench);
  bool pass = true;
  for (const auto& [name, c] : checks.items()) pass = pass && c.at("pass").get<bool>();
  return {{"level", o.level == VerifyLevel::exhaustive ? "exhaustive" : "fast"},
          {"seed", o.seed},
          {"corpus_items", corpus.size()},
          {"checks", checks},
          {"seconds", seconds_since(start)},
          {"pass", pass}};
}

}  // namespace labtrick
