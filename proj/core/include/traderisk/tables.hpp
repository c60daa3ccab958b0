#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "traderisk/model.hpp"
#include "traderisk/nullmodels.hpp"

namespace traderisk {

std::string_view tool_version();

/// "# traderisk <version> config=<hash>", the first line of every output.
std::string output_header(std::string_view config_hash);

/// Leading columns for ensemble-mean tables.
struct EnsembleTag {
  std::string scheme;
  std::size_t realizations = 0;
};

// Unavailable values are written as empty cells. Rows are in resource id
// order (then region order for regional rows).
void write_global_csv(std::ostream& out, const IndicatorTable& table, std::string_view header,
                      const EnsembleTag* tag = nullptr);
void write_regional_csv(std::ostream& out, const IndicatorTable& table, std::string_view header,
                        const EnsembleTag* tag = nullptr);
void write_warnings(std::ostream& out, const IndicatorTable& table, std::string_view header);

/// The whole table, including counters and warnings, as JSON. The meta
/// block records the tool version and config hash.
std::string indicator_table_json(const IndicatorTable& table, std::string_view config_hash);
/// Throws InputError on malformed input.
IndicatorTable parse_indicator_table_json(std::string_view text, const std::string& name);

void write_correlation_csv(std::ostream& out, const CorrelationReport& report,
                           std::string_view header);
std::string correlation_json(const CorrelationReport& report, std::string_view config_hash);
/// Aligned table with significance stars.
void write_correlation_text(std::ostream& out, const CorrelationReport& report,
                            std::string_view header);

/// scheme,realizations,metric,count,mean,stderr
void write_ensemble_csv(std::ostream& out, const std::vector<nullmodels::EnsembleSummary>& runs,
                        std::string_view header);

}  // namespace traderisk
