#include "traderisk/model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <iterator>

#include "traderisk/error.hpp"

namespace traderisk {

std::string normalize_id(std::string_view raw) {
  auto first = raw.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  auto last = raw.find_last_not_of(" \t\r\n");
  std::string out(raw.substr(first, last - first + 1));
  for (char& c : out) {
    c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  }
  return out;
}

std::optional<double> resolve_ps(const CountryRecord& country, int year) {
  const auto& ps = country.ps_by_year;
  if (ps.empty()) return std::nullopt;
  auto after = ps.lower_bound(year);
  if (after != ps.end() && after->first == year) return after->second;
  if (after == ps.begin()) return after->second;
  auto before = std::prev(after);
  if (after == ps.end()) return before->second;
  // ties go to the earlier year
  return (year - before->first <= after->first - year) ? before->second
                                                       : after->second;
}

std::string_view to_string(SupplyRiskSource source) {
  switch (source) {
    case SupplyRiskSource::nrc: return "NRC";
    case SupplyRiskSource::bgs: return "BGS";
    case SupplyRiskSource::ec: return "EC";
  }
  return "?";
}

std::string_view to_string(Classification c) {
  switch (c) {
    case Classification::major_metal: return "major-metal";
    case Classification::byproduct: return "byproduct";
    case Classification::other: return "other";
  }
  return "?";
}

std::optional<Classification> parse_classification(std::string_view text) {
  if (text == "major-metal") return Classification::major_metal;
  if (text == "byproduct") return Classification::byproduct;
  if (text == "other") return Classification::other;
  return std::nullopt;
}

template <class Record>
Registry<Record>::Registry(std::vector<Record> records)
    : records_(std::move(records)) {
  for (Record& r : records_) r.id = normalize_id(r.id);
  std::sort(records_.begin(), records_.end(),
            [](const Record& a, const Record& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < records_.size(); ++i) {
    if (records_[i].id.empty()) throw InputError("empty identifier in registry");
    if (i > 0 && records_[i].id == records_[i - 1].id) {
      throw InputError("duplicate identifier '" + records_[i].id + "'");
    }
  }
}

template <class Record>
std::optional<std::size_t> Registry<Record>::index_of(std::string_view id) const {
  auto it = std::lower_bound(
      records_.begin(), records_.end(), id,
      [](const Record& r, std::string_view key) { return r.id < key; });
  if (it == records_.end() || it->id != id) return std::nullopt;
  return static_cast<std::size_t>(it - records_.begin());
}

template <class Record>
const Record* Registry<Record>::find(std::string_view id) const {
  auto index = index_of(id);
  return index ? &records_[*index] : nullptr;
}

template class Registry<CountryRecord>;
template class Registry<ResourceRecord>;

const Layer* TradeFlowPanel::value_layer(std::string_view resource,
                                         int year) const {
  auto it = value_usd.find(LayerKey{std::string(resource), year});
  return it == value_usd.end() ? nullptr : &it->second;
}

const Layer* TradeFlowPanel::mass_layer(std::string_view resource,
                                        int year) const {
  auto it = mass_kg.find(LayerKey{std::string(resource), year});
  return it == mass_kg.end() ? nullptr : &it->second;
}

namespace {

bool in_unit_percent(double v) { return v >= 0.0 && v <= 100.0; }

std::string node_name(const CountryRegistry& countries, std::size_t index) {
  if (index < countries.size()) return countries[index].id;
  return "#" + std::to_string(index);
}

void check_layer(const TradeFlowPanel& panel, const LayerKey& key,
                 const Layer& layer, std::string_view kind,
                 std::vector<Violation>& out) {
  const auto& countries = panel.countries;
  if (layer.node_count() != countries.size()) {
    out.push_back({key.resource, key.year, "", "",
                   std::string(kind) + " layer node count " +
                       std::to_string(layer.node_count()) +
                       " differs from country registry size " +
                       std::to_string(countries.size())});
  }
  for (const Edge& e : layer.edges()) {
    auto violation = [&](std::string message) {
      out.push_back({key.resource, key.year, node_name(countries, e.source),
                     node_name(countries, e.target),
                     std::string(kind) + ": " + std::move(message)});
    };
    if (e.source >= countries.size() || e.target >= countries.size()) {
      violation("node index does not resolve to a country");
    }
    if (std::isnan(e.weight) || std::isinf(e.weight)) {
      violation("non-finite weight");
    } else if (e.weight < 0.0) {
      violation("negative weight");
    }
    if (e.source == e.target) violation("self-loop");
  }
}

}  // namespace

std::vector<Violation> validate_panel(const TradeFlowPanel& panel) {
  std::vector<Violation> out;
  for (const CountryRecord& c : panel.countries) {
    for (const auto& [year, ps] : c.ps_by_year) {
      if (!in_unit_percent(ps)) {
        out.push_back({"", year, c.id, "", "PS outside [0,100]"});
      }
    }
    if (c.rgi && !in_unit_percent(*c.rgi)) {
      out.push_back({"", std::nullopt, c.id, "", "RGI outside [0,100]"});
    }
  }
  for (const ResourceRecord& r : panel.resources) {
    if (r.reserves_kg && !(*r.reserves_kg >= 0.0)) {
      out.push_back({r.id, std::nullopt, "", "", "negative reserves"});
    }
    for (const auto& [region, ir] : r.import_reliance) {
      if (!(ir >= 0.0 && ir <= 1.0)) {
        out.push_back({r.id, std::nullopt, region, "",
                       "import reliance outside [0,1]"});
      }
    }
    for (const auto& [region, tb] : r.trade_barriers) {
      if (!(tb >= 0.0)) {
        out.push_back({r.id, std::nullopt, region, "", "negative trade barrier"});
      }
    }
  }
  for (const auto& [key, layer] : panel.value_usd) {
    if (!panel.resources.contains(key.resource)) {
      out.push_back({key.resource, key.year, "", "", "unknown resource"});
    }
    check_layer(panel, key, layer, "value_usd", out);
  }
  for (const auto& [key, layer] : panel.mass_kg) {
    auto value = panel.value_usd.find(key);
    if (value == panel.value_usd.end()) {
      out.push_back({key.resource, key.year, "", "",
                     "mass layer without value layer"});
    } else {
      for (const Edge& e : layer.edges()) {
        if (value->second.weight(e.source, e.target) == 0.0) {
          out.push_back({key.resource, key.year,
                         node_name(panel.countries, e.source),
                         node_name(panel.countries, e.target),
                         "mass_kg: mass recorded for a flow without value"});
        }
      }
    }
    check_layer(panel, key, layer, "mass_kg", out);
  }
  return out;
}

}  // namespace traderisk
