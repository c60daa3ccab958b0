#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "traderisk/config.hpp"
#include "traderisk/model.hpp"
#include "traderisk/nullmodels.hpp"

namespace traderisk {

/// Drops years (and their layers) outside `years`.
TradeFlowPanel restrict_years(const TradeFlowPanel& panel, const YearRange& years);

/// The panels the indicators are computed on. `global` is the thresholded
/// panel over countries; `regional` additionally has every requested region
/// condensed into one node.
struct PreparedPanels {
  TradeFlowPanel global;
  TradeFlowPanel regional;
  std::vector<std::string> regions;
};

/// Region resolution, per name in config.regions:
///   - a country id of the panel is used as is;
///   - otherwise the members listed under region.<NAME> plus every country
///     tagged NAME are condensed into a node called NAME.
/// Throws InputError when a region resolves to nothing.
TradeFlowPanel condense_regions(const TradeFlowPanel& panel, const Config& config);

PreparedPanels prepare_panels(const TradeFlowPanel& reconciled, const Config& config);

IndicatorTable compute_indicators(const PreparedPanels& panels, const Config& config);
IndicatorTable compute_indicators(const TradeFlowPanel& reconciled, const Config& config);

/// Correlations over the default spec for the table's regions.
CorrelationReport compute_correlations(const IndicatorTable& table);

// Metric names used in ensemble summaries:
//   global/<resource>/<field>
//   regional/<resource>/<region>/<field>
//   corr/<x>~<y>/rho, corr/<x>~<y>/p, corr/<x>~<y>|<z>/partial_rho, .../partial_p
nullmodels::Observation table_observation(const IndicatorTable& table);
nullmodels::Observation report_observation(const CorrelationReport& report);

struct NullModelResult {
  nullmodels::EnsembleSummary summary;
  IndicatorTable mean_table;      // ensemble means; unrandomized columns from the real table
  CorrelationReport mean_report;  // ensemble means of rho and p
};

/// Randomizes the thresholded value layers, condenses regions, recomputes
/// the network indicators and correlations per realization. Volatility,
/// IR, TB, S, TTV and CSR are taken from `real`: they do not depend on the
/// network structure.
NullModelResult run_null_model(const PreparedPanels& panels, const IndicatorTable& real,
                               nullmodels::Scheme scheme, const Config& config);

/// Resources by descending TR for `region`; ties by resource id. Resources
/// without TR are left out.
std::vector<std::pair<std::string, double>> rank_by_traderisk(const IndicatorTable& table,
                                                              const std::string& region);

// Output directories. Every file starts with output_header(config.hash()).
void write_indicator_outputs(const std::filesystem::path& dir, const IndicatorTable& table,
                             const Config& config);
/// correlations.{csv,json,txt}, scatter_<REGION>.csv, ranks_<REGION>.csv.
void write_correlation_outputs(const std::filesystem::path& dir, const CorrelationReport& report,
                               const IndicatorTable& table, const Config& config);
/// nullmodel_summary.csv plus per-scheme mean tables and correlations.
void write_nullmodel_outputs(const std::filesystem::path& dir,
                             const std::vector<NullModelResult>& results, const Config& config);

}  // namespace traderisk
