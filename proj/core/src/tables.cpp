#include "traderisk/tables.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

#include <json.hpp>

#include "traderisk/csv.hpp"
#include "traderisk/error.hpp"
#include "traderisk/stats.hpp"

namespace traderisk {

using nlohmann::json;

std::string_view tool_version() { return TRADERISK_VERSION; }

std::string output_header(std::string_view config_hash) {
  return "# traderisk " + std::string(tool_version()) + " config=" + std::string(config_hash);
}

namespace {

using csv::format_optional;

void write_tag_columns(std::ostream& out, const EnsembleTag* tag) {
  if (tag) out << csv::escape(tag->scheme) << ',' << tag->realizations << ',';
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> optional_from(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<double>();
}

}  // namespace

void write_global_csv(std::ostream& out, const IndicatorTable& table, std::string_view header,
                      const EnsembleTag* tag) {
  out << header << '\n';
  if (tag) out << "scheme,realizations,";
  out << "resource,avg_degree,largest_eigenvalue,scc_fraction,scarcity,total_trade_volume,"
         "csr,classification,layers,degenerate_layers\n";
  for (const auto& [resource, g] : table.global) {
    write_tag_columns(out, tag);
    out << csv::escape(resource) << ',' << format_optional(g.avg_degree) << ','
        << format_optional(g.largest_eigenvalue) << ',' << format_optional(g.scc_fraction) << ','
        << format_optional(g.scarcity) << ',' << format_optional(g.total_trade_volume) << ','
        << format_optional(g.csr) << ','
        << (g.classification ? to_string(*g.classification) : std::string_view{}) << ','
        << g.layers << ',' << g.degenerate_layers << '\n';
  }
}

void write_regional_csv(std::ostream& out, const IndicatorTable& table, std::string_view header,
                        const EnsembleTag* tag) {
  out << header << '\n';
  if (tag) out << "scheme,realizations,";
  out << "resource,region,pagerank,in_strength,in_degree,traderisk,instrength_traderisk,"
         "import_reliance,volatility,trade_barrier,years_used,degenerate_years\n";
  for (const auto& [key, r] : table.regional) {
    write_tag_columns(out, tag);
    out << csv::escape(key.resource) << ',' << csv::escape(key.region) << ','
        << format_optional(r.pagerank) << ',' << format_optional(r.in_strength) << ','
        << format_optional(r.in_degree) << ',' << format_optional(r.traderisk) << ','
        << format_optional(r.instrength_traderisk) << ',' << format_optional(r.import_reliance)
        << ',' << format_optional(r.volatility) << ',' << format_optional(r.trade_barrier) << ','
        << r.years_used << ',' << r.degenerate_years << '\n';
  }
}

void write_warnings(std::ostream& out, const IndicatorTable& table, std::string_view header) {
  out << header << '\n';
  out << "# non-converged computations: " << table.failures << '\n';
  for (const auto& w : table.warnings) out << w << '\n';
}

std::string indicator_table_json(const IndicatorTable& table, std::string_view config_hash) {
  json j;
  j["meta"] = {{"tool", "traderisk " + std::string(tool_version())},
               {"config_hash", std::string(config_hash)}};
  j["regions"] = table.regions;
  json global = json::array();
  for (const auto& [resource, g] : table.global) {
    global.push_back({{"resource", resource},
                      {"avg_degree", optional_json(g.avg_degree)},
                      {"largest_eigenvalue", optional_json(g.largest_eigenvalue)},
                      {"scc_fraction", optional_json(g.scc_fraction)},
                      {"scarcity", optional_json(g.scarcity)},
                      {"total_trade_volume", optional_json(g.total_trade_volume)},
                      {"csr", optional_json(g.csr)},
                      {"classification", g.classification
                                             ? json(std::string(to_string(*g.classification)))
                                             : json(nullptr)},
                      {"layers", g.layers},
                      {"degenerate_layers", g.degenerate_layers}});
  }
  j["global"] = std::move(global);
  json regional = json::array();
  for (const auto& [key, r] : table.regional) {
    regional.push_back({{"resource", key.resource},
                        {"region", key.region},
                        {"pagerank", optional_json(r.pagerank)},
                        {"in_strength", optional_json(r.in_strength)},
                        {"in_degree", optional_json(r.in_degree)},
                        {"traderisk", optional_json(r.traderisk)},
                        {"instrength_traderisk", optional_json(r.instrength_traderisk)},
                        {"import_reliance", optional_json(r.import_reliance)},
                        {"volatility", optional_json(r.volatility)},
                        {"trade_barrier", optional_json(r.trade_barrier)},
                        {"years_used", r.years_used},
                        {"degenerate_years", r.degenerate_years}});
  }
  j["regional"] = std::move(regional);
  j["warnings"] = table.warnings;
  j["failures"] = table.failures;
  return j.dump(2) + "\n";
}

IndicatorTable parse_indicator_table_json(std::string_view text, const std::string& name) {
  IndicatorTable table;
  try {
    json j = json::parse(text);
    table.regions = j.at("regions").get<std::vector<std::string>>();
    for (const json& g : j.at("global")) {
      GlobalIndicators row;
      row.avg_degree = optional_from(g, "avg_degree");
      row.largest_eigenvalue = optional_from(g, "largest_eigenvalue");
      row.scc_fraction = optional_from(g, "scc_fraction");
      row.scarcity = optional_from(g, "scarcity");
      row.total_trade_volume = optional_from(g, "total_trade_volume");
      row.csr = optional_from(g, "csr");
      if (!g.at("classification").is_null()) {
        row.classification = parse_classification(g.at("classification").get<std::string>());
        if (!row.classification) throw InputError(name, 0, "unknown classification");
      }
      row.layers = g.at("layers").get<std::size_t>();
      row.degenerate_layers = g.at("degenerate_layers").get<std::size_t>();
      table.global.emplace(g.at("resource").get<std::string>(), row);
    }
    for (const json& r : j.at("regional")) {
      RegionalIndicators row;
      row.pagerank = optional_from(r, "pagerank");
      row.in_strength = optional_from(r, "in_strength");
      row.in_degree = optional_from(r, "in_degree");
      row.traderisk = optional_from(r, "traderisk");
      row.instrength_traderisk = optional_from(r, "instrength_traderisk");
      row.import_reliance = optional_from(r, "import_reliance");
      row.volatility = optional_from(r, "volatility");
      row.trade_barrier = optional_from(r, "trade_barrier");
      row.years_used = r.at("years_used").get<std::size_t>();
      row.degenerate_years = r.at("degenerate_years").get<std::size_t>();
      table.regional.emplace(
          RegionKey{r.at("resource").get<std::string>(), r.at("region").get<std::string>()}, row);
    }
    table.warnings = j.at("warnings").get<std::vector<std::string>>();
    table.failures = j.at("failures").get<std::size_t>();
  } catch (const json::exception& e) {
    throw InputError(name, 0, std::string("malformed indicator table: ") + e.what());
  }
  return table;
}

void write_correlation_csv(std::ostream& out, const CorrelationReport& report,
                           std::string_view header) {
  out << header << '\n';
  out << "x,y,n,rho,p_value,stars,control,partial_n,partial_rho,partial_p,partial_stars\n";
  for (const auto& e : report.entries) {
    out << csv::escape(e.x_name) << ',' << csv::escape(e.y_name) << ',' << e.n << ','
        << format_optional(e.rho) << ',' << format_optional(e.p_value) << ','
        << stats::significance_stars(e.p_value) << ',';
    if (e.controlling_for) {
      out << csv::escape(*e.controlling_for) << ',' << e.partial_n << ','
          << format_optional(e.partial_rho) << ',' << format_optional(e.partial_p) << ','
          << stats::significance_stars(e.partial_p);
    } else {
      out << ",,,,";
    }
    out << '\n';
  }
}

std::string correlation_json(const CorrelationReport& report, std::string_view config_hash) {
  json j;
  j["meta"] = {{"tool", "traderisk " + std::string(tool_version())},
               {"config_hash", std::string(config_hash)}};
  json entries = json::array();
  for (const auto& e : report.entries) {
    json item = {{"x", e.x_name},
                 {"y", e.y_name},
                 {"n", e.n},
                 {"rho", optional_json(e.rho)},
                 {"p_value", optional_json(e.p_value)}};
    if (e.controlling_for) {
      item["control"] = *e.controlling_for;
      item["partial_n"] = e.partial_n;
      item["partial_rho"] = optional_json(e.partial_rho);
      item["partial_p"] = optional_json(e.partial_p);
    }
    entries.push_back(std::move(item));
  }
  j["entries"] = std::move(entries);
  return j.dump(2) + "\n";
}

namespace {

std::string fixed(const std::optional<double>& v, const std::string& stars) {
  if (!v) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", *v);
  return buf + stars;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

}  // namespace

void write_correlation_text(std::ostream& out, const CorrelationReport& report,
                            std::string_view header) {
  out << header << '\n';
  std::size_t wx = 1, wy = 1;
  for (const auto& e : report.entries) {
    wx = std::max(wx, e.x_name.size());
    wy = std::max(wy, e.y_name.size());
  }
  for (const auto& e : report.entries) {
    out << pad(e.x_name, wx) << "  " << pad(e.y_name, wy) << "  "
        << pad(fixed(e.rho, stats::significance_stars(e.p_value)), 10) << "n=" << e.n;
    if (e.controlling_for) {
      out << "  | " << *e.controlling_for << ": "
          << fixed(e.partial_rho, stats::significance_stars(e.partial_p)) << " n=" << e.partial_n;
    }
    out << '\n';
  }
  out << "* p<0.05  ** p<0.01  *** p<0.001\n";
}

void write_ensemble_csv(std::ostream& out, const std::vector<nullmodels::EnsembleSummary>& runs,
                        std::string_view header) {
  out << header << '\n';
  out << "scheme,realizations,failed,metric,count,mean,stderr\n";
  for (const auto& run : runs) {
    for (const auto& m : run.metrics) {
      out << nullmodels::to_string(run.scheme) << ',' << run.realizations << ',' << run.failed
          << ',' << csv::escape(m.name) << ',' << m.count << ',' << format_optional(m.mean) << ','
          << format_optional(m.standard_error) << '\n';
    }
  }
}

}  // namespace traderisk
