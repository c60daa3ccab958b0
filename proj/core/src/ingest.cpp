#include "traderisk/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <ostream>
#include <tuple>

#include "traderisk/csv.hpp"
#include "traderisk/error.hpp"

namespace traderisk {

std::optional<YearRange> YearRange::parse(std::string_view text) {
  auto colon = text.find(':');
  if (colon == std::string_view::npos) return std::nullopt;
  auto first = csv::parse_int(text.substr(0, colon));
  auto last = csv::parse_int(text.substr(colon + 1));
  if (!first || !last || *first > *last) return std::nullopt;
  return YearRange{static_cast<int>(*first), static_cast<int>(*last)};
}

namespace {

struct FlowKey {
  std::string resource;
  int year;
  std::size_t exporter;
  std::size_t importer;

  friend auto operator<=>(const FlowKey&, const FlowKey&) = default;
};

struct MirrorSides {
  std::optional<double> export_value, import_value;
  std::optional<double> export_mass, import_mass;
  std::size_t export_line = 0, import_line = 0;
};

std::string describe(const RawTradeRecord& r) {
  std::string s = std::string(r.direction == Direction::exports ? "export" : "import") +
                  " record " + r.reporter + "->" + r.partner + " " + r.resource +
                  " " + std::to_string(r.year);
  if (r.line) s += " (line " + std::to_string(r.line) + ")";
  return s;
}

using EdgeSums = std::map<std::pair<std::size_t, std::size_t>, double>;

Layer to_layer(std::size_t n, const EdgeSums& sums) {
  std::vector<Edge> edges;
  edges.reserve(sums.size());
  for (const auto& [st, w] : sums) edges.push_back({st.first, st.second, w});
  return Layer(n, std::move(edges));
}

}  // namespace

TradeFlowPanel reconcile(std::span<const RawTradeRecord> records,
                         CountryRegistry countries, ResourceRegistry resources) {
  std::map<FlowKey, MirrorSides> flows;
  std::set<int> years;
  for (const RawTradeRecord& r : records) {
    const std::string reporter = normalize_id(r.reporter);
    const std::string partner = normalize_id(r.partner);
    const std::string resource = normalize_id(r.resource);
    auto rep = countries.index_of(reporter);
    auto par = countries.index_of(partner);
    if (!rep) throw InputError("unknown country '" + reporter + "' in " + describe(r));
    if (!par) throw InputError("unknown country '" + partner + "' in " + describe(r));
    if (!resources.contains(resource)) {
      throw InputError("unknown resource '" + resource + "' in " + describe(r));
    }
    if (*rep == *par) throw InputError("reporter equals partner in " + describe(r));
    if (!(r.value_usd >= 0.0) || (r.mass_kg && !(*r.mass_kg >= 0.0))) {
      throw InputError("negative or invalid figure in " + describe(r));
    }
    const bool is_export = r.direction == Direction::exports;
    FlowKey key{resource, r.year, is_export ? *rep : *par, is_export ? *par : *rep};
    MirrorSides& sides = flows[key];
    auto& value = is_export ? sides.export_value : sides.import_value;
    auto& line = is_export ? sides.export_line : sides.import_line;
    if (value) {
      throw InputError("duplicate " + describe(r) +
                       (line ? " (first seen on line " + std::to_string(line) + ")" : ""));
    }
    value = r.value_usd;
    line = r.line ? r.line : 0;
    (is_export ? sides.export_mass : sides.import_mass) = r.mass_kg;
    years.insert(r.year);
  }

  const std::size_t n = countries.size();
  std::map<LayerKey, EdgeSums> value_sums, mass_sums;
  for (const auto& [key, sides] : flows) {
    const double value = std::max(sides.export_value.value_or(0.0),
                                  sides.import_value.value_or(0.0));
    if (value == 0.0) continue;
    LayerKey layer_key{key.resource, key.year};
    value_sums[layer_key][{key.exporter, key.importer}] = value;
    if (sides.export_mass || sides.import_mass) {
      const double mass = std::max(sides.export_mass.value_or(0.0),
                                   sides.import_mass.value_or(0.0));
      if (mass > 0.0) mass_sums[layer_key][{key.exporter, key.importer}] = mass;
    }
  }

  TradeFlowPanel panel;
  panel.countries = std::move(countries);
  panel.resources = std::move(resources);
  panel.years.assign(years.begin(), years.end());
  for (const auto& [key, sums] : value_sums) panel.value_usd.emplace(key, to_layer(n, sums));
  for (const auto& [key, sums] : mass_sums) panel.mass_kg.emplace(key, to_layer(n, sums));
  return panel;
}

TradeFlowPanel apply_threshold(const TradeFlowPanel& panel, double theta) {
  if (!(theta >= 0.0 && theta < 1.0)) {
    throw std::invalid_argument("threshold must lie in [0, 1)");
  }
  TradeFlowPanel out;
  out.countries = panel.countries;
  out.resources = panel.resources;
  out.years = panel.years;
  for (const auto& [key, layer] : panel.value_usd) {
    const std::size_t n = layer.node_count();
    std::vector<double> imports(n, 0.0);
    for (const Edge& e : layer.edges()) imports[e.target] += e.weight;

    std::vector<Edge> kept;
    for (const Edge& e : layer.edges()) {
      if (e.weight / imports[e.target] > theta) kept.push_back(e);
    }
    if (kept.empty()) continue;

    if (const Layer* mass = panel.mass_layer(key.resource, key.year)) {
      std::vector<Edge> kept_mass;
      for (const Edge& e : kept) {
        const double m = mass->weight(e.source, e.target);
        if (m != 0.0) kept_mass.push_back({e.source, e.target, m});
      }
      if (!kept_mass.empty()) out.mass_kg.emplace(key, Layer(n, std::move(kept_mass)));
    }
    out.value_usd.emplace(key, Layer(n, std::move(kept)));
  }
  return out;
}

TradeFlowPanel condense_members(const TradeFlowPanel& panel,
                                const std::set<std::string>& members,
                                std::string_view new_node_id) {
  const std::string node_id = normalize_id(new_node_id);
  if (node_id.empty()) throw InputError("empty id for condensed node");
  if (panel.countries.contains(node_id)) {
    throw InputError("condensed node id '" + node_id + "' collides with an existing country");
  }
  const std::size_t n_old = panel.countries.size();
  std::vector<bool> is_member(n_old, false);
  std::size_t member_count = 0;
  for (const std::string& m : members) {
    if (auto idx = panel.countries.index_of(normalize_id(m))) {
      if (!is_member[*idx]) ++member_count;
      is_member[*idx] = true;
    }
  }
  if (member_count == 0) {
    throw InputError("region '" + node_id + "' has no member countries");
  }

  // External value imports per member, per year and over all years.
  std::map<int, std::vector<double>> imports_by_year;
  std::vector<double> imports_total(n_old, 0.0);
  for (const auto& [key, layer] : panel.value_usd) {
    auto& per_year = imports_by_year[key.year];
    per_year.resize(n_old, 0.0);
    for (const Edge& e : layer.edges()) {
      if (is_member[e.target] && !is_member[e.source]) {
        per_year[e.target] += e.weight;
        imports_total[e.target] += e.weight;
      }
    }
  }

  CountryRecord node;
  node.id = node_id;
  std::set<int> ps_years(panel.years.begin(), panel.years.end());
  for (std::size_t i = 0; i < n_old; ++i) {
    if (!is_member[i]) continue;
    for (const auto& [year, ps] : panel.countries[i].ps_by_year) ps_years.insert(year);
  }
  for (int year : ps_years) {
    const auto found = imports_by_year.find(year);
    double weight_sum = 0.0;
    for (std::size_t i = 0; i < n_old; ++i) {
      if (is_member[i] && resolve_ps(panel.countries[i], year) && found != imports_by_year.end()) {
        weight_sum += found->second[i];
      }
    }
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n_old; ++i) {
      if (!is_member[i]) continue;
      auto ps = resolve_ps(panel.countries[i], year);
      if (!ps) continue;
      const double w = weight_sum > 0.0 ? found->second[i] : 1.0;
      num += w * *ps;
      den += w;
    }
    if (den > 0.0) node.ps_by_year[year] = num / den;
  }
  {
    double weight_sum = 0.0;
    for (std::size_t i = 0; i < n_old; ++i) {
      if (is_member[i] && panel.countries[i].rgi) weight_sum += imports_total[i];
    }
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n_old; ++i) {
      if (!is_member[i] || !panel.countries[i].rgi) continue;
      const double w = weight_sum > 0.0 ? imports_total[i] : 1.0;
      num += w * *panel.countries[i].rgi;
      den += w;
    }
    if (den > 0.0) node.rgi = num / den;
  }

  std::vector<CountryRecord> records;
  records.reserve(n_old - member_count + 1);
  for (std::size_t i = 0; i < n_old; ++i) {
    if (!is_member[i]) records.push_back(panel.countries[i]);
  }
  records.push_back(std::move(node));
  CountryRegistry countries(std::move(records));
  const std::size_t node_index = *countries.index_of(node_id);
  std::vector<std::size_t> remap(n_old);
  for (std::size_t i = 0; i < n_old; ++i) {
    remap[i] = is_member[i] ? node_index : *countries.index_of(panel.countries[i].id);
  }

  const std::size_t n_new = countries.size();
  auto condense_layers = [&](const std::map<LayerKey, Layer>& layers) {
    std::map<LayerKey, Layer> out;
    for (const auto& [key, layer] : layers) {
      EdgeSums sums;
      for (const Edge& e : layer.edges()) {
        if (is_member[e.source] && is_member[e.target]) continue;
        sums[{remap[e.source], remap[e.target]}] += e.weight;
      }
      if (!sums.empty()) out.emplace(key, to_layer(n_new, sums));
    }
    return out;
  };

  TradeFlowPanel out;
  out.countries = std::move(countries);
  out.resources = panel.resources;
  out.years = panel.years;
  out.value_usd = condense_layers(panel.value_usd);
  out.mass_kg = condense_layers(panel.mass_kg);
  std::erase_if(out.mass_kg, [&](const auto& kv) { return !out.value_usd.contains(kv.first); });
  return out;
}

TradeFlowPanel condense_region(const TradeFlowPanel& panel,
                               std::string_view region_tag,
                               std::string_view new_node_id) {
  const std::string tag = normalize_id(region_tag);
  std::set<std::string> members;
  for (const CountryRecord& c : panel.countries) {
    if (c.region_tags.contains(tag)) members.insert(c.id);
  }
  if (members.empty()) {
    throw InputError("region tag '" + tag + "' matches no country");
  }
  return condense_members(panel, members, new_node_id);
}

// ---------------------------------------------------------------------------
// CSV readers and writers

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::vector<std::string> read_header(csv::Reader& reader) {
  std::vector<std::string> header;
  if (!reader.next(header)) return {};
  for (auto& h : header) h = lower(normalize_id(h));
  return header;
}

void expect_header(csv::Reader& reader, const std::vector<std::string>& header,
                   const std::vector<std::string>& expected) {
  if (header != expected) {
    std::string want;
    for (std::size_t i = 0; i < expected.size(); ++i) {
      want += (i ? "," : "") + expected[i];
    }
    reader.fail("expected header '" + want + "'");
  }
}

double require_number(csv::Reader& reader, const std::string& text,
                      std::string_view column) {
  auto v = csv::parse_double(text);
  if (!v) reader.fail("invalid number '" + text + "' in column " + std::string(column));
  return *v;
}

std::optional<double> optional_number(csv::Reader& reader, const std::string& text,
                                      std::string_view column) {
  if (text.find_first_not_of(" \t") == std::string::npos) return std::nullopt;
  return require_number(reader, text, column);
}

}  // namespace

CountryRegistry read_countries(std::istream& in, const std::string& name) {
  csv::Reader reader(in, name);
  const auto header = read_header(reader);
  if (header.empty()) reader.fail("missing header row");
  expect_header(reader, header, {"id", "year", "ps", "rgi", "region_tags"});

  std::map<std::string, CountryRecord> by_id;
  std::vector<std::string> f;
  while (reader.next(f)) {
    if (f.size() != 5) reader.fail("expected 5 fields, got " + std::to_string(f.size()));
    const std::string id = normalize_id(f[0]);
    if (id.empty()) reader.fail("empty country id");
    CountryRecord& c = by_id[id];
    c.id = id;
    auto year = optional_number(reader, f[1], "year");
    auto ps = optional_number(reader, f[2], "ps");
    if (ps && !year) reader.fail("ps given without year");
    if (year) {
      if (*year != static_cast<int>(*year)) reader.fail("year must be an integer");
      if (!ps) reader.fail("year given without ps");
      if (*ps < 0.0 || *ps > 100.0) reader.fail("ps outside [0,100]");
      if (!c.ps_by_year.emplace(static_cast<int>(*year), *ps).second) {
        reader.fail("duplicate ps for " + id + " in " + f[1]);
      }
    }
    if (auto rgi = optional_number(reader, f[3], "rgi")) {
      if (*rgi < 0.0 || *rgi > 100.0) reader.fail("rgi outside [0,100]");
      if (c.rgi && *c.rgi != *rgi) reader.fail("conflicting rgi for " + id);
      c.rgi = *rgi;
    }
    std::string_view tags = f[4];
    while (!tags.empty()) {
      auto semi = tags.find(';');
      auto tag = normalize_id(tags.substr(0, semi));
      if (!tag.empty()) c.region_tags.insert(tag);
      if (semi == std::string_view::npos) break;
      tags.remove_prefix(semi + 1);
    }
  }
  std::vector<CountryRecord> records;
  for (auto& [id, c] : by_id) records.push_back(std::move(c));
  return CountryRegistry(std::move(records));
}

ResourceRegistry read_resources(std::istream& in, const std::string& name) {
  csv::Reader reader(in, name);
  const auto header = read_header(reader);
  if (header.empty()) reader.fail("missing header row");
  if (header.front() != "id") reader.fail("first column must be 'id'");
  for (std::string_view required : {"reserves_kg", "sr_nrc", "sr_bgs", "sr_ec", "classification"}) {
    if (std::find(header.begin(), header.end(), required) == header.end()) {
      reader.fail("missing column '" + std::string(required) + "'");
    }
  }
  for (std::size_t i = 1; i < header.size(); ++i) {
    const std::string& h = header[i];
    const bool known = h == "reserves_kg" || h == "sr_nrc" || h == "sr_bgs" ||
                       h == "sr_ec" || h == "classification" ||
                       (h.size() > 3 && (h.starts_with("ir_") || h.starts_with("tb_")));
    if (!known) reader.fail("unknown column '" + h + "'");
    if (std::find(header.begin(), header.begin() + i, h) != header.begin() + i) {
      reader.fail("duplicate column '" + h + "'");
    }
  }

  std::vector<ResourceRecord> records;
  std::set<std::string> seen;
  std::vector<std::string> f;
  while (reader.next(f)) {
    if (f.size() != header.size()) {
      reader.fail("expected " + std::to_string(header.size()) + " fields, got " +
                  std::to_string(f.size()));
    }
    ResourceRecord r;
    r.id = normalize_id(f[0]);
    if (r.id.empty()) reader.fail("empty resource id");
    if (!seen.insert(r.id).second) reader.fail("duplicate resource '" + r.id + "'");
    for (std::size_t i = 1; i < header.size(); ++i) {
      const std::string& h = header[i];
      if (h == "classification") {
        auto text = lower(normalize_id(f[i]));
        if (text.empty()) continue;
        r.classification = parse_classification(text);
        if (!r.classification) reader.fail("unknown classification '" + f[i] + "'");
        continue;
      }
      auto v = optional_number(reader, f[i], h);
      if (!v) continue;
      if (h == "reserves_kg") {
        if (*v < 0.0) reader.fail("negative reserves");
        r.reserves_kg = *v;
      } else if (h == "sr_nrc") {
        r.supply_risk[SupplyRiskSource::nrc] = *v;
      } else if (h == "sr_bgs") {
        r.supply_risk[SupplyRiskSource::bgs] = *v;
      } else if (h == "sr_ec") {
        r.supply_risk[SupplyRiskSource::ec] = *v;
      } else if (h.starts_with("ir_")) {
        if (*v < 0.0 || *v > 1.0) reader.fail("import reliance outside [0,1]");
        r.import_reliance[normalize_id(h.substr(3))] = *v;
      } else {
        if (*v < 0.0) reader.fail("negative trade barrier");
        r.trade_barriers[normalize_id(h.substr(3))] = *v;
      }
    }
    records.push_back(std::move(r));
  }
  return ResourceRegistry(std::move(records));
}

std::vector<RawTradeRecord> read_trade_records(std::istream& in, const std::string& name,
                                               const CountryRegistry& countries,
                                               const ResourceRegistry& resources,
                                               const YearRange& years) {
  csv::Reader reader(in, name);
  std::vector<RawTradeRecord> records;
  const auto header = read_header(reader);
  if (header.empty()) return records;
  expect_header(reader, header,
                {"year", "reporter", "partner", "resource", "direction", "value_usd", "mass_kg"});
  std::vector<std::string> f;
  while (reader.next(f)) {
    if (f.size() != 7) reader.fail("expected 7 fields, got " + std::to_string(f.size()));
    RawTradeRecord r;
    auto year = csv::parse_int(f[0]);
    if (!year) reader.fail("invalid year '" + f[0] + "'");
    r.year = static_cast<int>(*year);
    if (!years.contains(r.year)) {
      reader.fail("year " + f[0] + " outside configured range " +
                  std::to_string(years.first) + ":" + std::to_string(years.last));
    }
    r.reporter = normalize_id(f[1]);
    r.partner = normalize_id(f[2]);
    r.resource = normalize_id(f[3]);
    if (!countries.contains(r.reporter)) reader.fail("unknown country '" + r.reporter + "'");
    if (!countries.contains(r.partner)) reader.fail("unknown country '" + r.partner + "'");
    if (!resources.contains(r.resource)) reader.fail("unknown resource '" + r.resource + "'");
    if (r.reporter == r.partner) reader.fail("reporter equals partner");
    const std::string direction = lower(normalize_id(f[4]));
    if (direction == "import") {
      r.direction = Direction::imports;
    } else if (direction == "export") {
      r.direction = Direction::exports;
    } else {
      reader.fail("direction must be 'import' or 'export'");
    }
    r.value_usd = require_number(reader, f[5], "value_usd");
    if (r.value_usd < 0.0) reader.fail("negative value_usd");
    r.mass_kg = optional_number(reader, f[6], "mass_kg");
    if (r.mass_kg && *r.mass_kg < 0.0) reader.fail("negative mass_kg");
    r.line = reader.line();
    records.push_back(std::move(r));
  }
  return records;
}

void write_countries(std::ostream& out, const CountryRegistry& countries) {
  out << "id,year,ps,rgi,region_tags\n";
  for (const CountryRecord& c : countries) {
    std::string tags;
    for (const auto& t : c.region_tags) tags += (tags.empty() ? "" : ";") + t;
    const std::string rgi = csv::format_optional(c.rgi);
    if (c.ps_by_year.empty()) {
      out << csv::join({c.id, "", "", rgi, tags}) << '\n';
    }
    for (const auto& [year, ps] : c.ps_by_year) {
      out << csv::join({c.id, std::to_string(year), csv::format_double(ps), rgi, tags}) << '\n';
    }
  }
}

void write_resources(std::ostream& out, const ResourceRegistry& resources) {
  std::set<std::string> ir_regions, tb_regions;
  for (const ResourceRecord& r : resources) {
    for (const auto& [region, v] : r.import_reliance) ir_regions.insert(region);
    for (const auto& [region, v] : r.trade_barriers) tb_regions.insert(region);
  }
  std::vector<std::string> header{"id", "reserves_kg", "sr_nrc", "sr_bgs", "sr_ec"};
  for (const auto& region : ir_regions) header.push_back("ir_" + region);
  for (const auto& region : tb_regions) header.push_back("tb_" + region);
  header.push_back("classification");
  out << csv::join(header) << '\n';
  auto lookup = [](const auto& map, const auto& key) -> std::optional<double> {
    auto it = map.find(key);
    if (it == map.end()) return std::nullopt;
    return it->second;
  };
  for (const ResourceRecord& r : resources) {
    std::vector<std::string> row{r.id, csv::format_optional(r.reserves_kg)};
    for (SupplyRiskSource s : kSupplyRiskSources) {
      row.push_back(csv::format_optional(lookup(r.supply_risk, s)));
    }
    for (const auto& region : ir_regions) row.push_back(csv::format_optional(lookup(r.import_reliance, region)));
    for (const auto& region : tb_regions) row.push_back(csv::format_optional(lookup(r.trade_barriers, region)));
    row.push_back(r.classification ? std::string(to_string(*r.classification)) : "");
    out << csv::join(row) << '\n';
  }
}

void write_trade_records(std::ostream& out, std::span<const RawTradeRecord> records) {
  out << "year,reporter,partner,resource,direction,value_usd,mass_kg\n";
  for (const RawTradeRecord& r : records) {
    out << csv::join({std::to_string(r.year), r.reporter, r.partner, r.resource,
                      r.direction == Direction::imports ? "import" : "export",
                      csv::format_double(r.value_usd), csv::format_optional(r.mass_kg)})
        << '\n';
  }
}

namespace {

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path.string(), 0, "cannot open file");
  return in;
}

}  // namespace

TradeFlowPanel parse_files(const std::filesystem::path& trade_path,
                           const std::filesystem::path& countries_path,
                           const std::filesystem::path& resources_path,
                           const IngestConfig& config) {
  auto countries_in = open_input(countries_path);
  auto resources_in = open_input(resources_path);
  auto trade_in = open_input(trade_path);
  CountryRegistry countries = read_countries(countries_in, countries_path.string());
  ResourceRegistry resources = read_resources(resources_in, resources_path.string());
  auto records = read_trade_records(trade_in, trade_path.string(), countries, resources,
                                    config.years);
  TradeFlowPanel panel = reconcile(records, std::move(countries), std::move(resources));
  auto violations = validate_panel(panel);
  if (!violations.empty()) {
    const Violation& v = violations.front();
    throw InputError("panel validation failed (" + std::to_string(violations.size()) +
                     " violations), first: " + v.resource + " " +
                     (v.year ? std::to_string(*v.year) : "") + " " + v.source + "->" +
                     v.target + ": " + v.message);
  }
  return panel;
}

}  // namespace traderisk
