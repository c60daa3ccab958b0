#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "traderisk/layer.hpp"

namespace traderisk {

/// Uppercases ASCII letters and trims surrounding whitespace. All country,
/// resource and region identifiers pass through here.
std::string normalize_id(std::string_view raw);

struct CountryRecord {
  std::string id;
  std::map<int, double> ps_by_year;  // political stability, [0, 100]
  std::optional<double> rgi;         // resource governance, [0, 100]
  std::set<std::string> region_tags;

  friend bool operator==(const CountryRecord&, const CountryRecord&) = default;
};

/// PS for `year`, falling back to the nearest year with data (the earlier
/// one on ties). nullopt when the country has no PS at all.
std::optional<double> resolve_ps(const CountryRecord& country, int year);

enum class SupplyRiskSource { nrc, bgs, ec };
inline constexpr SupplyRiskSource kSupplyRiskSources[] = {
    SupplyRiskSource::nrc, SupplyRiskSource::bgs, SupplyRiskSource::ec};
std::string_view to_string(SupplyRiskSource source);

enum class Classification { major_metal, byproduct, other };
std::string_view to_string(Classification c);
std::optional<Classification> parse_classification(std::string_view text);

struct ResourceRecord {
  std::string id;
  std::optional<double> reserves_kg;
  std::map<SupplyRiskSource, double> supply_risk;
  std::map<std::string, double> import_reliance;  // region -> [0, 1]
  std::map<std::string, double> trade_barriers;   // region -> >= 0
  std::optional<Classification> classification;

  friend bool operator==(const ResourceRecord&,
                         const ResourceRecord&) = default;
};

/// Id-sorted record collection. The position of a record is its node index.
template <class Record>
class Registry {
 public:
  Registry() = default;
  /// Normalizes ids, sorts by id. Throws InputError on duplicate ids.
  explicit Registry(std::vector<Record> records);

  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }
  const Record& operator[](std::size_t index) const { return records_[index]; }
  const std::vector<Record>& records() const noexcept { return records_; }
  auto begin() const noexcept { return records_.begin(); }
  auto end() const noexcept { return records_.end(); }

  std::optional<std::size_t> index_of(std::string_view id) const;
  const Record* find(std::string_view id) const;
  bool contains(std::string_view id) const { return find(id) != nullptr; }

  friend bool operator==(const Registry&, const Registry&) = default;

 private:
  std::vector<Record> records_;
};

using CountryRegistry = Registry<CountryRecord>;
using ResourceRegistry = Registry<ResourceRecord>;

extern template class Registry<CountryRecord>;
extern template class Registry<ResourceRecord>;

struct LayerKey {
  std::string resource;
  int year = 0;

  friend auto operator<=>(const LayerKey&, const LayerKey&) = default;
};

/// Time-indexed multiplex of bilateral flows, one value layer (USD) and an
/// optional mass layer (kg) per (resource, year). Node indices refer to
/// positions in `countries`.
struct TradeFlowPanel {
  CountryRegistry countries;
  ResourceRegistry resources;
  std::vector<int> years;
  std::map<LayerKey, Layer> value_usd;
  std::map<LayerKey, Layer> mass_kg;

  const Layer* value_layer(std::string_view resource, int year) const;
  const Layer* mass_layer(std::string_view resource, int year) const;

  friend bool operator==(const TradeFlowPanel&,
                         const TradeFlowPanel&) = default;
};

struct Violation {
  std::string resource;
  std::optional<int> year;
  std::string source;  // country id (or index when unresolvable)
  std::string target;
  std::string message;
};

/// Checks every model invariant; empty result iff the panel is valid.
std::vector<Violation> validate_panel(const TradeFlowPanel& panel);

struct GlobalIndicators {
  std::optional<double> avg_degree;
  std::optional<double> largest_eigenvalue;
  std::optional<double> scc_fraction;
  std::optional<double> scarcity;
  std::optional<double> total_trade_volume;
  std::optional<double> csr;
  std::optional<Classification> classification;
  std::size_t layers = 0;
  std::size_t degenerate_layers = 0;

  friend bool operator==(const GlobalIndicators&,
                         const GlobalIndicators&) = default;
};

struct RegionalIndicators {
  std::optional<double> pagerank;
  std::optional<double> in_strength;
  std::optional<double> in_degree;
  std::optional<double> traderisk;
  std::optional<double> instrength_traderisk;
  std::optional<double> import_reliance;
  std::optional<double> volatility;
  std::optional<double> trade_barrier;
  std::size_t years_used = 0;
  std::size_t degenerate_years = 0;

  friend bool operator==(const RegionalIndicators&,
                         const RegionalIndicators&) = default;
};

struct RegionKey {
  std::string resource;
  std::string region;

  friend auto operator<=>(const RegionKey&, const RegionKey&) = default;
};

struct IndicatorTable {
  std::vector<std::string> regions;
  std::map<std::string, GlobalIndicators> global;
  std::map<RegionKey, RegionalIndicators> regional;
  std::vector<std::string> warnings;
  std::size_t failures = 0;  // non-converged computations

  friend bool operator==(const IndicatorTable&,
                         const IndicatorTable&) = default;
};

struct CorrelationEntry {
  std::string x_name;
  std::string y_name;
  std::size_t n = 0;
  std::optional<double> rho;
  std::optional<double> p_value;
  std::optional<std::string> controlling_for;
  std::size_t partial_n = 0;
  std::optional<double> partial_rho;
  std::optional<double> partial_p;

  friend bool operator==(const CorrelationEntry&,
                         const CorrelationEntry&) = default;
};

struct CorrelationReport {
  std::vector<CorrelationEntry> entries;

  friend bool operator==(const CorrelationReport&,
                         const CorrelationReport&) = default;
};

}  // namespace traderisk
