#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace labtrick {

enum class VerifyLevel { fast, exhaustive };
VerifyLevel parse_verify_level(const std::string& s);

// Labels 2, 3, ... handed out to radius pairs (dx, dy), dx <= dy, in order of
// increasing dx + dy, then increasing min(dx, dy). table[dx][dy] for
// 1 <= dx, dy with dx + dy <= max_sum; other cells are 0.
std::vector<std::vector<std::uint32_t>> drnl_enumeration_table(std::size_t max_sum);

struct SuiteOptions {
  VerifyLevel level = VerifyLevel::fast;
  std::uint64_t seed = 1;
  std::size_t workers = 1;
};

// Runs every check and returns {"pass": bool, "checks": {name: {...,"pass"}}}.
nlohmann::json verify_suite(const SuiteOptions& options);

struct WlBenchOptions {
  std::size_t degree = 3;
  std::vector<std::size_t> sizes{16, 24, 32};
  std::size_t hops = 2;
  std::size_t seeds = 20;
  std::uint64_t base_seed = 1;
  std::size_t workers = 1;
};

// Indistinguishable-pair counts on random regular graphs, per size:
// fraction of seeds with at least one pair, mean count, self-check failures.
nlohmann::json wl_bench(const WlBenchOptions& options);

}  // namespace labtrick
