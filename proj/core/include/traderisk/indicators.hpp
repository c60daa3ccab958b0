#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "traderisk/graph.hpp"
#include "traderisk/model.hpp"

namespace traderisk {

/// Which exporter score scales the import shares in V.
enum class StabilityMode { ps, rgi, none };
std::string_view to_string(StabilityMode mode);
std::optional<StabilityMode> parse_stability_mode(std::string_view text);

/// How yearly PageRank vectors enter the time average.
enum class PageRankScale {
  unit_sum,  // each yearly vector divided by its sum
  raw,       // the fixed point as is
};
std::string_view to_string(PageRankScale scale);
std::optional<PageRankScale> parse_pagerank_scale(std::string_view text);

/// Collects data-gap warnings and non-converged computations.
struct Diagnostics {
  std::vector<std::string> warnings;
  std::size_t failures = 0;

  void warn(std::string message) { warnings.push_back(std::move(message)); }
};

struct VulnerabilityNetwork {
  std::string resource;
  int year = 0;
  Layer weights;  // V_ij in [0, 1]

  /// B_ij = 1 where V_ij > 0 (stored as weight 1).
  Layer adjacency() const;
};

/// V_ij = (1 - s_i / 100) * M_ij / sum_i M_ij with s the exporter's PS(t),
/// RGI, or 0. A missing score gives factor 1 and a warning.
/// Throws std::out_of_range when the (resource, year) layer does not exist.
VulnerabilityNetwork vulnerability_network(const TradeFlowPanel& panel,
                                           std::string_view resource, int year,
                                           StabilityMode mode,
                                           Diagnostics* diagnostics = nullptr);

struct IndicatorOptions {
  StabilityMode stability = StabilityMode::ps;
  PageRankScale pagerank_scale = PageRankScale::unit_sum;
  graph::PageRankOptions pagerank;
};

/// Time-averaged PageRank, in-strength and in-degree of `region` over the
/// years whose layer exists, and the TradeRisk products with IR. TB is
/// copied from the resource record; volatility is left empty.
/// Throws InputError when `region` is not a node of the panel.
RegionalIndicators traderisk(const TradeFlowPanel& panel, std::string_view resource,
                             std::string_view region, std::span<const int> years,
                             const IndicatorOptions& options = {},
                             Diagnostics* diagnostics = nullptr);

/// Same for several regions, sharing one PageRank solve per layer. Rows are
/// in `regions` order.
std::vector<RegionalIndicators> traderisk(const TradeFlowPanel& panel, std::string_view resource,
                                          std::span<const std::string> regions,
                                          std::span<const int> years,
                                          const IndicatorOptions& options = {},
                                          Diagnostics* diagnostics = nullptr);

/// Sum of all mass flows of `resource` over every year.
double total_trade_volume(const TradeFlowPanel& panel, std::string_view resource);

/// log(TTV / R); nullopt when reserves are missing or zero or TTV is zero.
std::optional<double> scarcity(const TradeFlowPanel& panel, std::string_view resource);

struct PriceSeries {
  std::map<int, double> prices;  // USD/kg, export side
  std::vector<double> returns;   // log returns over consecutive years
  std::optional<double> volatility;
};

PriceSeries price_and_volatility(const TradeFlowPanel& panel, std::string_view resource,
                                 std::string_view region, std::span<const int> years,
                                 Diagnostics* diagnostics = nullptr);

/// Per-source min-max rescaling, then the mean over available sources.
/// Every registry resource appears in the result; nullopt = unavailable.
std::map<std::string, std::optional<double>> composite_supply_risk(
    const ResourceRegistry& resources);

/// Per-resource global columns: time-averaged k, lambda and SCC fraction of
/// V, plus S, TTV, CSR and the classification.
std::map<std::string, GlobalIndicators> global_table(const TradeFlowPanel& panel,
                                                     const IndicatorOptions& options = {},
                                                     Diagnostics* diagnostics = nullptr);

/// Full table: global rows from `global_panel`, regional rows from
/// `regional_panel` (where the regions are nodes).
IndicatorTable indicator_table(const TradeFlowPanel& global_panel,
                               const TradeFlowPanel& regional_panel,
                               const std::vector<std::string>& regions,
                               const IndicatorOptions& options = {});

}  // namespace traderisk
