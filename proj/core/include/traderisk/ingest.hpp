#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "traderisk/model.hpp"

namespace traderisk {

enum class Direction { imports, exports };

/// One side of a bilateral flow as reported by `reporter`.
struct RawTradeRecord {
  int year = 0;
  std::string reporter;
  std::string partner;
  std::string resource;
  Direction direction = Direction::exports;
  double value_usd = 0.0;
  std::optional<double> mass_kg;
  std::size_t line = 0;  // source line, 0 when not parsed from a file

  friend bool operator==(const RawTradeRecord&, const RawTradeRecord&) = default;
};

struct YearRange {
  int first = 2000;
  int last = 2012;

  bool contains(int year) const { return year >= first && year <= last; }
  /// Parses "FIRST:LAST".
  static std::optional<YearRange> parse(std::string_view text);
};

inline constexpr double kDefaultImportShareThreshold = 0.01;

/// Builds the value and mass multiplex from mirror records: each flow takes
/// the larger of the exporter-reported and importer-reported figures, a
/// missing side counting as zero. Zero-value flows are dropped.
///
/// Throws InputError on duplicate (direction, reporter, partner, resource,
/// year) records, self-flows, negative figures, or unknown ids.
TradeFlowPanel reconcile(std::span<const RawTradeRecord> records,
                         CountryRegistry countries, ResourceRegistry resources);

/// Keeps a flow i -> j only if it is more than `theta` of j's total imports
/// (totals taken before thresholding). The mass layer follows the value
/// layer flow by flow.
TradeFlowPanel apply_threshold(const TradeFlowPanel& panel,
                               double theta = kDefaultImportShareThreshold);

/// Replaces `members` with a single node `new_node_id`: internal flows are
/// removed, flows to and from outside are summed per (resource, year) and
/// layer. The node's PS(t) is the members' mean weighted by their external
/// value imports in t (uniform when those are all zero).
///
/// Throws InputError when no member exists or `new_node_id` is taken.
TradeFlowPanel condense_members(const TradeFlowPanel& panel,
                                const std::set<std::string>& members,
                                std::string_view new_node_id);

/// condense_members over every country tagged `region_tag`.
TradeFlowPanel condense_region(const TradeFlowPanel& panel,
                               std::string_view region_tag,
                               std::string_view new_node_id);

// CSV formats. All readers are strict and report file:line on failure.

CountryRegistry read_countries(std::istream& in, const std::string& name);
ResourceRegistry read_resources(std::istream& in, const std::string& name);
std::vector<RawTradeRecord> read_trade_records(
    std::istream& in, const std::string& name, const CountryRegistry& countries,
    const ResourceRegistry& resources, const YearRange& years);

void write_countries(std::ostream& out, const CountryRegistry& countries);
void write_resources(std::ostream& out, const ResourceRegistry& resources);
void write_trade_records(std::ostream& out,
                         std::span<const RawTradeRecord> records);

struct IngestConfig {
  YearRange years;
};

/// Reads the three input files and reconciles them into a validated panel.
TradeFlowPanel parse_files(const std::filesystem::path& trade_path,
                           const std::filesystem::path& countries_path,
                           const std::filesystem::path& resources_path,
                           const IngestConfig& config = {});

}  // namespace traderisk
