#include "traderisk/indicators.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "traderisk/error.hpp"

namespace traderisk {

std::string_view to_string(StabilityMode mode) {
  switch (mode) {
    case StabilityMode::ps: return "ps";
    case StabilityMode::rgi: return "rgi";
    case StabilityMode::none: return "none";
  }
  return "?";
}

std::optional<StabilityMode> parse_stability_mode(std::string_view text) {
  if (text == "ps") return StabilityMode::ps;
  if (text == "rgi") return StabilityMode::rgi;
  if (text == "none") return StabilityMode::none;
  return std::nullopt;
}

std::string_view to_string(PageRankScale scale) {
  return scale == PageRankScale::raw ? "raw" : "unit-sum";
}

std::optional<PageRankScale> parse_pagerank_scale(std::string_view text) {
  if (text == "raw") return PageRankScale::raw;
  if (text == "unit-sum") return PageRankScale::unit_sum;
  return std::nullopt;
}

Layer VulnerabilityNetwork::adjacency() const {
  std::vector<Edge> edges;
  edges.reserve(weights.edge_count());
  for (const Edge& e : weights.edges()) {
    if (e.weight > 0.0) edges.push_back({e.source, e.target, 1.0});
  }
  return Layer(weights.node_count(), std::move(edges));
}

namespace {

void warn(Diagnostics* d, std::string message) {
  if (d) d->warn(std::move(message));
}

double instability_factor(const CountryRecord& c, int year, StabilityMode mode,
                          Diagnostics* d) {
  std::optional<double> score;
  switch (mode) {
    case StabilityMode::none: return 1.0;
    case StabilityMode::ps:
      score = resolve_ps(c, year);
      if (score && !c.ps_by_year.contains(year) && d) {
        d->warn("PS for " + c.id + " in " + std::to_string(year) +
                " taken from nearest available year");
      }
      break;
    case StabilityMode::rgi: score = c.rgi; break;
  }
  if (!score) {
    warn(d, std::string(mode == StabilityMode::ps ? "PS" : "RGI") + " missing for " + c.id +
                "; its exports carry weight factor 1");
    return 1.0;
  }
  return 1.0 - *score / 100.0;
}

template <class T>
std::optional<double> lookup(const std::map<std::string, T>& map, std::string_view key) {
  auto it = map.find(std::string(key));
  if (it == map.end()) return std::nullopt;
  return it->second;
}

}  // namespace

VulnerabilityNetwork vulnerability_network(const TradeFlowPanel& panel,
                                           std::string_view resource, int year,
                                           StabilityMode mode, Diagnostics* diagnostics) {
  const Layer* m = panel.value_layer(resource, year);
  if (!m) {
    throw std::out_of_range("no trade layer for " + std::string(resource) + " in " +
                            std::to_string(year));
  }
  const std::size_t n = m->node_count();
  std::vector<double> imports(n, 0.0);
  for (const Edge& e : m->edges()) imports[e.target] += e.weight;

  std::vector<double> factor(n, 1.0);
  std::vector<bool> exporter(n, false);
  for (const Edge& e : m->edges()) exporter[e.source] = true;
  for (std::size_t i = 0; i < n; ++i) {
    if (exporter[i]) factor[i] = instability_factor(panel.countries[i], year, mode, diagnostics);
  }

  std::vector<Edge> edges;
  edges.reserve(m->edge_count());
  for (const Edge& e : m->edges()) {
    if (imports[e.target] <= 0.0) continue;
    edges.push_back({e.source, e.target, factor[e.source] * (e.weight / imports[e.target])});
  }
  return VulnerabilityNetwork{std::string(resource), year, Layer(n, std::move(edges))};
}

std::vector<RegionalIndicators> traderisk(const TradeFlowPanel& panel, std::string_view resource,
                                          std::span<const std::string> regions,
                                          std::span<const int> years,
                                          const IndicatorOptions& options,
                                          Diagnostics* diagnostics) {
  std::vector<std::size_t> nodes;
  for (const std::string& region : regions) {
    const auto node = panel.countries.index_of(region);
    if (!node) {
      throw InputError("region '" + region + "' is not a node of the panel");
    }
    nodes.push_back(*node);
  }
  const std::size_t m = nodes.size();
  std::vector<RegionalIndicators> out(m);
  std::vector<double> pr_sum(m, 0.0), strength_sum(m, 0.0), degree_sum(m, 0.0);
  for (int year : years) {
    if (!panel.value_layer(resource, year)) continue;
    const auto v = vulnerability_network(panel, resource, year, options.stability, diagnostics);
    graph::PageRankResult pr;
    try {
      pr = graph::pagerank(v.weights, options.pagerank);
    } catch (const ConvergenceError& e) {
      if (diagnostics) {
        ++diagnostics->failures;
        diagnostics->warn(std::string(resource) + " " + std::to_string(year) + ": " + e.what());
      }
      continue;
    }
    double total = 1.0;
    if (options.pagerank_scale == PageRankScale::unit_sum) {
      total = 0.0;
      for (double s : pr.scores) total += s;
    }
    const auto metrics = graph::degrees_and_strengths(v.weights);
    for (std::size_t k = 0; k < m; ++k) {
      if (pr.degenerate) ++out[k].degenerate_years;
      pr_sum[k] += pr.scores[nodes[k]] / total;
      strength_sum[k] += metrics.in_strength[nodes[k]];
      degree_sum[k] += static_cast<double>(metrics.in_degree[nodes[k]]);
      ++out[k].years_used;
    }
  }

  const ResourceRecord* record = panel.resources.find(resource);
  for (std::size_t k = 0; k < m; ++k) {
    RegionalIndicators& row = out[k];
    if (record) {
      row.import_reliance = lookup(record->import_reliance, regions[k]);
      row.trade_barrier = lookup(record->trade_barriers, regions[k]);
    }
    if (row.years_used == 0) continue;
    const double count = static_cast<double>(row.years_used);
    row.pagerank = pr_sum[k] / count;
    row.in_strength = strength_sum[k] / count;
    row.in_degree = degree_sum[k] / count;
    if (row.import_reliance) {
      row.traderisk = *row.pagerank * *row.import_reliance;
      row.instrength_traderisk = *row.in_strength * *row.import_reliance;
    }
  }
  return out;
}

RegionalIndicators traderisk(const TradeFlowPanel& panel, std::string_view resource,
                             std::string_view region, std::span<const int> years,
                             const IndicatorOptions& options, Diagnostics* diagnostics) {
  const std::string regions[] = {std::string(region)};
  return traderisk(panel, resource, regions, years, options, diagnostics).front();
}

double total_trade_volume(const TradeFlowPanel& panel, std::string_view resource) {
  double total = 0.0;
  for (const auto& [key, layer] : panel.mass_kg) {
    if (key.resource == resource) total += layer.total_weight();
  }
  return total;
}

std::optional<double> scarcity(const TradeFlowPanel& panel, std::string_view resource) {
  const ResourceRecord* record = panel.resources.find(resource);
  if (!record || !record->reserves_kg || *record->reserves_kg <= 0.0) return std::nullopt;
  const double ttv = total_trade_volume(panel, resource);
  if (ttv <= 0.0) return std::nullopt;
  return std::log(ttv / *record->reserves_kg);
}

PriceSeries price_and_volatility(const TradeFlowPanel& panel, std::string_view resource,
                                 std::string_view region, std::span<const int> years,
                                 Diagnostics* diagnostics) {
  PriceSeries out;
  const auto node = panel.countries.index_of(region);
  if (!node) return out;
  for (int year : years) {
    const Layer* value = panel.value_layer(resource, year);
    if (!value) continue;
    const Layer* mass = panel.mass_layer(resource, year);
    double value_sum = 0.0, mass_sum = 0.0;
    for (const Edge& e : value->edges()) {
      if (e.source != *node) continue;
      value_sum += e.weight;
      if (mass) mass_sum += mass->weight(e.source, e.target);
    }
    if (value_sum <= 0.0) continue;
    if (mass_sum <= 0.0) {
      warn(diagnostics, std::string(resource) + " " + std::string(region) + " " +
                            std::to_string(year) + ": exports without mass, year excluded from prices");
      continue;
    }
    out.prices[year] = value_sum / mass_sum;
  }
  for (auto it = out.prices.begin(); it != out.prices.end(); ++it) {
    auto next = std::next(it);
    if (next != out.prices.end() && next->first == it->first + 1) {
      out.returns.push_back(std::log(next->second / it->second));
    }
  }
  if (out.returns.size() >= 2) {
    double mean = 0.0;
    for (double r : out.returns) mean += r;
    mean /= static_cast<double>(out.returns.size());
    double ss = 0.0;
    for (double r : out.returns) ss += (r - mean) * (r - mean);
    out.volatility = std::sqrt(ss / static_cast<double>(out.returns.size() - 1));
  }
  return out;
}

std::map<std::string, std::optional<double>> composite_supply_risk(
    const ResourceRegistry& resources) {
  std::map<std::string, double> sums;
  std::map<std::string, int> counts;
  for (SupplyRiskSource source : kSupplyRiskSources) {
    double lo = INFINITY, hi = -INFINITY;
    for (const ResourceRecord& r : resources) {
      auto it = r.supply_risk.find(source);
      if (it == r.supply_risk.end()) continue;
      lo = std::min(lo, it->second);
      hi = std::max(hi, it->second);
    }
    if (!(hi > lo)) continue;  // fewer than two distinct values
    for (const ResourceRecord& r : resources) {
      auto it = r.supply_risk.find(source);
      if (it == r.supply_risk.end()) continue;
      sums[r.id] += (it->second - lo) / (hi - lo);
      ++counts[r.id];
    }
  }
  std::map<std::string, std::optional<double>> out;
  for (const ResourceRecord& r : resources) {
    auto c = counts.find(r.id);
    out[r.id] = c == counts.end() ? std::nullopt
                                  : std::optional<double>(sums[r.id] / c->second);
  }
  return out;
}

std::map<std::string, GlobalIndicators> global_table(const TradeFlowPanel& panel,
                                                     const IndicatorOptions& options,
                                                     Diagnostics* diagnostics) {
  const auto csr = composite_supply_risk(panel.resources);
  std::map<std::string, GlobalIndicators> out;
  const graph::EigenOptions eigen{options.pagerank.tol, options.pagerank.max_iter};
  for (const ResourceRecord& r : panel.resources) {
    GlobalIndicators g;
    g.classification = r.classification;
    g.csr = csr.at(r.id);
    g.scarcity = scarcity(panel, r.id);
    double degree_sum = 0.0, lambda_sum = 0.0, scc_sum = 0.0;
    std::size_t lambda_count = 0;
    for (int year : panel.years) {
      if (!panel.value_layer(r.id, year)) continue;
      const auto v = vulnerability_network(panel, r.id, year, options.stability, diagnostics);
      const Layer b = v.adjacency();
      degree_sum += static_cast<double>(b.edge_count()) / static_cast<double>(b.node_count());
      scc_sum += graph::largest_scc_fraction(b);
      ++g.layers;
      try {
        const double lambda = graph::leading_eigenvalue(v.weights, eigen);
        if (lambda < eigen.tol) ++g.degenerate_layers;
        lambda_sum += lambda;
        ++lambda_count;
      } catch (const ConvergenceError& e) {
        if (diagnostics) {
          ++diagnostics->failures;
          diagnostics->warn(r.id + " " + std::to_string(year) + ": " + e.what());
        }
      }
    }
    bool has_mass = false;
    for (int year : panel.years) has_mass = has_mass || panel.mass_layer(r.id, year);
    if (has_mass) g.total_trade_volume = total_trade_volume(panel, r.id);
    if (g.layers > 0) {
      g.avg_degree = degree_sum / static_cast<double>(g.layers);
      g.scc_fraction = scc_sum / static_cast<double>(g.layers);
    }
    if (lambda_count > 0) g.largest_eigenvalue = lambda_sum / static_cast<double>(lambda_count);
    out.emplace(r.id, std::move(g));
  }
  return out;
}

IndicatorTable indicator_table(const TradeFlowPanel& global_panel,
                               const TradeFlowPanel& regional_panel,
                               const std::vector<std::string>& regions,
                               const IndicatorOptions& options) {
  IndicatorTable table;
  table.regions = regions;
  Diagnostics diagnostics;
  table.global = global_table(global_panel, options, &diagnostics);
  for (const ResourceRecord& r : regional_panel.resources) {
    auto rows = traderisk(regional_panel, r.id, regions, regional_panel.years, options,
                          &diagnostics);
    for (std::size_t k = 0; k < regions.size(); ++k) {
      rows[k].volatility =
          price_and_volatility(regional_panel, r.id, regions[k], regional_panel.years,
                               &diagnostics)
              .volatility;
      table.regional.emplace(RegionKey{r.id, regions[k]}, std::move(rows[k]));
    }
  }
  // identical messages repeat once per layer; keep one of each, in order
  std::set<std::string> seen;
  for (auto& w : diagnostics.warnings) {
    if (seen.insert(w).second) table.warnings.push_back(std::move(w));
  }
  table.failures = diagnostics.failures;
  return table;
}

}  // namespace traderisk
