#include "traderisk/nullmodels.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <stdexcept>
#include <thread>
#include <unordered_map>

#include "traderisk/csv.hpp"

namespace traderisk::nullmodels {

std::string_view to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::fix_degree: return "fix-degree";
    case Scheme::fix_in_degree: return "fix-in-deg";
    case Scheme::fix_in_out_degree: return "fix-in-out-deg";
  }
  return "?";
}

std::optional<Scheme> parse_scheme(std::string_view text) {
  for (Scheme s : kSchemes) {
    if (to_string(s) == text) return s;
  }
  return std::nullopt;
}

std::uint64_t Rng::below(std::uint64_t bound) {
  constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t limit = kMax - (kMax % bound + 1) % bound;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x > limit);
  return x % bound;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base_seed, std::string_view resource, int year,
                          std::uint64_t realization) {
  std::uint64_t h = splitmix64(base_seed);
  h = splitmix64(h ^ csv::fnv1a64(resource));
  h = splitmix64(h ^ static_cast<std::uint64_t>(static_cast<std::int64_t>(year)));
  h = splitmix64(h ^ realization);
  return h;
}

Layer randomize_fix_degree(const Layer& layer, std::uint64_t seed) {
  const std::uint64_t n = layer.node_count();
  const std::uint64_t cells = n < 2 ? 0 : n * (n - 1);
  const std::uint64_t links = layer.edge_count();
  if (links > cells) {
    throw std::invalid_argument("randomize_fix_degree: more links than off-diagonal cells");
  }
  Rng rng(seed);
  // Partial Fisher-Yates over the virtual array of cell ids.
  std::unordered_map<std::uint64_t, std::uint64_t> swapped;
  auto at = [&](std::uint64_t i) {
    auto it = swapped.find(i);
    return it == swapped.end() ? i : it->second;
  };
  std::vector<Edge> edges;
  edges.reserve(links);
  std::uint64_t k = 0;
  for (const Edge& e : layer.edges()) {
    const std::uint64_t j = k + rng.below(cells - k);
    const std::uint64_t cell = at(j);
    swapped[j] = at(k);
    ++k;
    const std::uint64_t source = cell / (n - 1);
    std::uint64_t target = cell % (n - 1);
    if (target >= source) ++target;
    edges.push_back({static_cast<std::size_t>(source), static_cast<std::size_t>(target), e.weight});
  }
  return Layer(layer.node_count(), std::move(edges));
}

Layer randomize_fix_indeg(const Layer& layer, std::uint64_t seed) {
  const std::size_t n = layer.node_count();
  if (layer.empty()) return layer;
  if (n < 3) throw std::invalid_argument("randomize_fix_indeg: needs at least 3 nodes");
  Rng rng(seed);
  std::map<std::pair<std::size_t, std::size_t>, double> sums;
  for (const Edge& e : layer.edges()) {
    std::size_t source = static_cast<std::size_t>(rng.below(n - 1));
    if (source >= e.target) ++source;
    sums[{source, e.target}] += e.weight;
  }
  std::vector<Edge> edges;
  edges.reserve(sums.size());
  for (const auto& [st, w] : sums) edges.push_back({st.first, st.second, w});
  return Layer(n, std::move(edges));
}

Layer randomize_fix_inout(const Layer& layer, std::uint64_t seed) {
  std::vector<Edge> edges(layer.edges().begin(), layer.edges().end());
  Rng rng(seed);
  for (std::size_t i = edges.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.below(i));
    std::swap(edges[i - 1].weight, edges[j].weight);
  }
  return Layer(layer.node_count(), std::move(edges));
}

Layer randomize(const Layer& layer, Scheme scheme, std::uint64_t seed) {
  switch (scheme) {
    case Scheme::fix_degree: return randomize_fix_degree(layer, seed);
    case Scheme::fix_in_degree: return randomize_fix_indeg(layer, seed);
    case Scheme::fix_in_out_degree: return randomize_fix_inout(layer, seed);
  }
  return layer;
}

TradeFlowPanel randomize_panel(const TradeFlowPanel& panel, Scheme scheme,
                               std::uint64_t base_seed, std::uint64_t realization) {
  TradeFlowPanel out;
  out.countries = panel.countries;
  out.resources = panel.resources;
  out.years = panel.years;
  for (const auto& [key, layer] : panel.value_usd) {
    out.value_usd.emplace(
        key, randomize(layer, scheme, derive_seed(base_seed, key.resource, key.year, realization)));
  }
  return out;
}

const MetricSummary* EnsembleSummary::find(std::string_view name) const {
  for (const MetricSummary& m : metrics) {
    if (m.name == name) return &m;
  }
  return nullptr;
}

EnsembleSummary ensemble_run(const TradeFlowPanel& panel, Scheme scheme,
                             const EnsembleOptions& options, const Downstream& downstream) {
  if (options.realizations == 0) {
    throw std::invalid_argument("ensemble_run: realizations must be >= 1");
  }
  struct Outcome {
    std::optional<Observation> observation;
    std::string error;
  };
  std::vector<Outcome> outcomes(options.realizations);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t r = next++; r < options.realizations; r = next++) {
      try {
        outcomes[r].observation =
            downstream(randomize_panel(panel, scheme, options.base_seed, r));
      } catch (const std::exception& e) {
        outcomes[r].error = e.what();
      }
    }
  };
  const std::size_t jobs = std::clamp<std::size_t>(options.jobs, 1, options.realizations);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> threads;
    for (std::size_t t = 0; t < jobs; ++t) threads.emplace_back(worker);
  }

  EnsembleSummary summary;
  summary.scheme = scheme;
  summary.realizations = options.realizations;
  std::vector<std::string> order;
  std::map<std::string, std::vector<double>> values;
  for (std::size_t r = 0; r < outcomes.size(); ++r) {
    if (!outcomes[r].observation) {
      ++summary.failed;
      summary.failure_messages.push_back("realization " + std::to_string(r) + ": " +
                                         outcomes[r].error);
      continue;
    }
    for (const auto& [name, value] : *outcomes[r].observation) {
      auto [it, inserted] = values.try_emplace(name);
      if (inserted) order.push_back(name);
      if (value) it->second.push_back(*value);
    }
  }
  for (const std::string& name : order) {
    const auto& xs = values[name];
    MetricSummary m;
    m.name = name;
    m.count = xs.size();
    if (!xs.empty()) {
      // shifted sums: a constant series averages to itself exactly
      const double x0 = xs.front();
      double dev = 0.0;
      for (double x : xs) dev += x - x0;
      const double mean = x0 + dev / static_cast<double>(xs.size());
      m.mean = mean;
      if (xs.size() >= 2) {
        double ss = 0.0;
        for (double x : xs) ss += (x - mean) * (x - mean);
        const double sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
        m.standard_error = sd / std::sqrt(static_cast<double>(xs.size()));
      }
    }
    summary.metrics.push_back(std::move(m));
  }
  return summary;
}

}  // namespace traderisk::nullmodels
