#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "traderisk/indicators.hpp"
#include "traderisk/ingest.hpp"

namespace traderisk {

/// Environment variable naming the default config file.
inline constexpr const char* kConfigEnvVar = "TRADERISK_CONFIG";

/// Pipeline settings. Precedence, lowest first: built-in defaults, the
/// config file (--config, else $TRADERISK_CONFIG), command-line flags.
///
/// File format: one `key = value` per line, '#' starts a comment.
///   threshold      = 0.01
///   alpha_factor   = 0.85
///   years          = 2000:2012
///   realizations   = 100
///   tol            = 1e-10
///   max_iter       = 100000
///   regions        = EU,US
///   stability      = ps | rgi | none
///   pagerank_scale = unit-sum | raw
///   pagerank_flow  = downstream | upstream
///   seed           = 0
///   jobs           = 1
///   region.<NAME>  = ID;ID;...   (members condensed into node NAME)
struct Config {
  double threshold = kDefaultImportShareThreshold;
  double alpha_factor = 0.85;
  YearRange years{2000, 2012};
  std::size_t realizations = 100;
  double tol = 1e-10;
  std::size_t max_iter = 100000;
  std::vector<std::string> regions{"EU", "US"};
  StabilityMode stability = StabilityMode::ps;
  PageRankScale pagerank_scale = PageRankScale::unit_sum;
  graph::PageRankFlow pagerank_flow = graph::PageRankFlow::downstream;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  std::map<std::string, std::set<std::string>> region_members;

  /// Defaults including the 27-member EU list of 2012.
  static Config defaults();

  /// Throws InputError on unknown keys or invalid values.
  void set(std::string_view key, std::string_view value);

  /// Sorted `key=value` lines of every setting that affects outputs (jobs
  /// is excluded: results do not depend on it).
  std::string canonical() const;
  std::string hash() const;

  IndicatorOptions indicator_options() const;
};

/// Applies a config file on top of `base`.
Config load_config(const std::filesystem::path& path, Config base = Config::defaults());

std::vector<std::string> split_list(std::string_view text, char separator);

}  // namespace traderisk
