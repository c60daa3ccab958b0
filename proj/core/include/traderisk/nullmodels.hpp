#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "traderisk/model.hpp"

namespace traderisk::nullmodels {

enum class Scheme {
  fix_degree,         // flows move to random distinct cells
  fix_in_degree,      // exporters redrawn, importers kept
  fix_in_out_degree,  // links kept, weights permuted
};
inline constexpr Scheme kSchemes[] = {Scheme::fix_degree, Scheme::fix_in_degree,
                                      Scheme::fix_in_out_degree};

/// "fix-degree", "fix-in-deg", "fix-in-out-deg".
std::string_view to_string(Scheme scheme);
std::optional<Scheme> parse_scheme(std::string_view text);

/// Portable generator: raw mt19937_64 output with rejection sampling for
/// bounded draws, so sequences match across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t next() { return engine_(); }
  /// Uniform in [0, bound); bound > 0.
  std::uint64_t below(std::uint64_t bound);

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

/// splitmix64 chain over base seed, FNV-1a-64 of the resource id, year and
/// realization index.
std::uint64_t derive_seed(std::uint64_t base_seed, std::string_view resource, int year,
                          std::uint64_t realization);

/// Assigns the weights to uniformly drawn distinct off-diagonal cells.
/// Throws std::invalid_argument when there are more links than cells.
Layer randomize_fix_degree(const Layer& layer, std::uint64_t seed);

/// Redraws each flow's exporter uniformly among the other nodes; flows that
/// land on the same pair are summed. Throws std::invalid_argument when a
/// non-empty layer has fewer than 3 nodes.
Layer randomize_fix_indeg(const Layer& layer, std::uint64_t seed);

/// Uniform permutation of the weights over the existing links.
Layer randomize_fix_inout(const Layer& layer, std::uint64_t seed);

Layer randomize(const Layer& layer, Scheme scheme, std::uint64_t seed);

/// Randomizes every value layer with seeds from derive_seed. Mass layers are
/// dropped: randomized panels carry network structure only.
TradeFlowPanel randomize_panel(const TradeFlowPanel& panel, Scheme scheme,
                               std::uint64_t base_seed, std::uint64_t realization);

using Observation = std::vector<std::pair<std::string, std::optional<double>>>;
using Downstream = std::function<Observation(const TradeFlowPanel&)>;

struct MetricSummary {
  std::string name;
  std::size_t count = 0;  // realizations where the metric was available
  std::optional<double> mean;
  std::optional<double> standard_error;  // sample sd / sqrt(count), count >= 2
};

struct EnsembleSummary {
  Scheme scheme = Scheme::fix_degree;
  std::size_t realizations = 0;
  std::size_t failed = 0;
  std::vector<std::string> failure_messages;
  std::vector<MetricSummary> metrics;

  const MetricSummary* find(std::string_view name) const;
};

struct EnsembleOptions {
  std::size_t realizations = 100;
  std::uint64_t base_seed = 0;
  std::size_t jobs = 1;
};

/// Runs `downstream` on `realizations` independently randomized panels.
/// Results are merged in realization order, so the summary does not depend
/// on `jobs`. Realizations whose downstream throws are excluded and counted.
EnsembleSummary ensemble_run(const TradeFlowPanel& panel, Scheme scheme,
                             const EnsembleOptions& options, const Downstream& downstream);

}  // namespace traderisk::nullmodels
