#include "traderisk/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include "traderisk/csv.hpp"
#include "traderisk/error.hpp"
#include "traderisk/indicators.hpp"
#include "traderisk/stats.hpp"
#include "traderisk/tables.hpp"

namespace traderisk {

TradeFlowPanel restrict_years(const TradeFlowPanel& panel, const YearRange& years) {
  TradeFlowPanel out;
  out.countries = panel.countries;
  out.resources = panel.resources;
  for (int y : panel.years) {
    if (years.contains(y)) out.years.push_back(y);
  }
  for (const auto& [key, layer] : panel.value_usd) {
    if (years.contains(key.year)) out.value_usd.emplace(key, layer);
  }
  for (const auto& [key, layer] : panel.mass_kg) {
    if (years.contains(key.year)) out.mass_kg.emplace(key, layer);
  }
  return out;
}

TradeFlowPanel condense_regions(const TradeFlowPanel& panel, const Config& config) {
  TradeFlowPanel out = panel;
  for (const std::string& raw : config.regions) {
    const std::string region = normalize_id(raw);
    if (out.countries.contains(region)) continue;
    std::set<std::string> members;
    if (auto it = config.region_members.find(region); it != config.region_members.end()) {
      members = it->second;
    }
    for (const CountryRecord& c : out.countries) {
      if (c.region_tags.contains(region)) members.insert(c.id);
    }
    bool any = std::any_of(members.begin(), members.end(),
                           [&](const std::string& m) { return out.countries.contains(m); });
    if (!any) throw InputError("unknown region '" + region + "': not a country and no members");
    out = condense_members(out, members, region);
  }
  return out;
}

PreparedPanels prepare_panels(const TradeFlowPanel& reconciled, const Config& config) {
  PreparedPanels p;
  p.global = apply_threshold(restrict_years(reconciled, config.years), config.threshold);
  p.regional = condense_regions(p.global, config);
  for (const auto& r : config.regions) p.regions.push_back(normalize_id(r));
  return p;
}

IndicatorTable compute_indicators(const PreparedPanels& panels, const Config& config) {
  return indicator_table(panels.global, panels.regional, panels.regions,
                         config.indicator_options());
}

IndicatorTable compute_indicators(const TradeFlowPanel& reconciled, const Config& config) {
  return compute_indicators(prepare_panels(reconciled, config), config);
}

CorrelationReport compute_correlations(const IndicatorTable& table) {
  return stats::correlation_suite(table, stats::default_correlation_spec(table.regions));
}

namespace {

using nullmodels::Observation;

template <class Row>
using Field = std::pair<const char*, std::optional<double> Row::*>;

const Field<GlobalIndicators> kGlobalFields[] = {
    {"avg_degree", &GlobalIndicators::avg_degree},
    {"largest_eigenvalue", &GlobalIndicators::largest_eigenvalue},
    {"scc_fraction", &GlobalIndicators::scc_fraction},
};

const Field<RegionalIndicators> kRegionalFields[] = {
    {"pagerank", &RegionalIndicators::pagerank},
    {"in_strength", &RegionalIndicators::in_strength},
    {"in_degree", &RegionalIndicators::in_degree},
    {"traderisk", &RegionalIndicators::traderisk},
    {"instrength_traderisk", &RegionalIndicators::instrength_traderisk},
};

std::string global_key(const std::string& resource, const char* field) {
  return "global/" + resource + "/" + field;
}

std::string regional_key(const RegionKey& key, const char* field) {
  return "regional/" + key.resource + "/" + key.region + "/" + field;
}

std::string corr_key(const CorrelationEntry& e) { return "corr/" + e.x_name + "~" + e.y_name; }

std::string partial_key(const CorrelationEntry& e) {
  return corr_key(e) + "|" + e.controlling_for.value_or("");
}

}  // namespace

Observation table_observation(const IndicatorTable& table) {
  Observation obs;
  for (const auto& [resource, row] : table.global) {
    for (const auto& [name, member] : kGlobalFields) {
      obs.emplace_back(global_key(resource, name), row.*member);
    }
  }
  for (const auto& [key, row] : table.regional) {
    for (const auto& [name, member] : kRegionalFields) {
      obs.emplace_back(regional_key(key, name), row.*member);
    }
  }
  return obs;
}

Observation report_observation(const CorrelationReport& report) {
  Observation obs;
  for (const auto& e : report.entries) {
    if (e.controlling_for) {
      obs.emplace_back(partial_key(e) + "/partial_rho", e.partial_rho);
      obs.emplace_back(partial_key(e) + "/partial_p", e.partial_p);
    } else {
      obs.emplace_back(corr_key(e) + "/rho", e.rho);
      obs.emplace_back(corr_key(e) + "/p", e.p_value);
    }
  }
  return obs;
}

NullModelResult run_null_model(const PreparedPanels& panels, const IndicatorTable& real,
                               nullmodels::Scheme scheme, const Config& config) {
  const IndicatorOptions options = config.indicator_options();

  // Network columns from the randomized panel, the rest from the real table.
  auto overlay = [&](const IndicatorTable& randomized) {
    IndicatorTable t = real;
    for (auto& [resource, row] : t.global) {
      auto it = randomized.global.find(resource);
      for (const auto& [name, member] : kGlobalFields) {
        row.*member = it == randomized.global.end() ? std::nullopt : it->second.*member;
      }
      if (it != randomized.global.end()) {
        row.layers = it->second.layers;
        row.degenerate_layers = it->second.degenerate_layers;
      }
    }
    for (auto& [key, row] : t.regional) {
      auto it = randomized.regional.find(key);
      for (const auto& [name, member] : kRegionalFields) {
        row.*member = it == randomized.regional.end() ? std::nullopt : it->second.*member;
      }
      if (it != randomized.regional.end()) {
        row.years_used = it->second.years_used;
        row.degenerate_years = it->second.degenerate_years;
      }
    }
    t.warnings.clear();
    t.failures = randomized.failures;
    return t;
  };

  nullmodels::Downstream downstream = [&](const TradeFlowPanel& randomized_global) {
    TradeFlowPanel randomized_regional = condense_regions(randomized_global, config);
    IndicatorTable t = overlay(
        indicator_table(randomized_global, randomized_regional, panels.regions, options));
    Observation obs = table_observation(t);
    for (auto& item : report_observation(compute_correlations(t))) obs.push_back(std::move(item));
    return obs;
  };

  nullmodels::EnsembleOptions ensemble;
  ensemble.realizations = config.realizations;
  ensemble.base_seed = config.seed;
  ensemble.jobs = config.jobs;

  NullModelResult result;
  result.summary = nullmodels::ensemble_run(panels.global, scheme, ensemble, downstream);

  auto mean = [&](const std::string& name) -> std::optional<double> {
    const auto* m = result.summary.find(name);
    return m ? m->mean : std::nullopt;
  };

  result.mean_table = real;
  result.mean_table.warnings.clear();
  result.mean_table.failures = 0;
  for (auto& [resource, row] : result.mean_table.global) {
    for (const auto& [name, member] : kGlobalFields) row.*member = mean(global_key(resource, name));
  }
  for (auto& [key, row] : result.mean_table.regional) {
    for (const auto& [name, member] : kRegionalFields) row.*member = mean(regional_key(key, name));
  }
  for (const auto& msg : result.summary.failure_messages) result.mean_table.warnings.push_back(msg);
  result.mean_table.failures = result.summary.failed;

  result.mean_report = compute_correlations(real);
  for (auto& e : result.mean_report.entries) {
    // partial entries repeat a plain pair; its ensemble mean is shared
    e.rho = mean(corr_key(e) + "/rho");
    e.p_value = mean(corr_key(e) + "/p");
    if (e.controlling_for) {
      e.partial_rho = mean(partial_key(e) + "/partial_rho");
      e.partial_p = mean(partial_key(e) + "/partial_p");
    }
  }
  return result;
}

std::vector<std::pair<std::string, double>> rank_by_traderisk(const IndicatorTable& table,
                                                              const std::string& region) {
  std::vector<std::pair<std::string, double>> ranked;
  for (const auto& [key, row] : table.regional) {
    if (key.region == region && row.traderisk) ranked.emplace_back(key.resource, *row.traderisk);
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  return ranked;
}

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError(path.string(), 0, "cannot write file");
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  open_output(path) << text;
}

}  // namespace

void write_indicator_outputs(const std::filesystem::path& dir, const IndicatorTable& table,
                             const Config& config) {
  std::filesystem::create_directories(dir);
  const std::string header = output_header(config.hash());
  {
    auto out = open_output(dir / "global.csv");
    write_global_csv(out, table, header);
  }
  {
    auto out = open_output(dir / "regional.csv");
    write_regional_csv(out, table, header);
  }
  {
    auto out = open_output(dir / "warnings.txt");
    write_warnings(out, table, header);
  }
  write_text(dir / "indicators.json", indicator_table_json(table, config.hash()));
}

void write_correlation_outputs(const std::filesystem::path& dir, const CorrelationReport& report,
                               const IndicatorTable& table, const Config& config) {
  std::filesystem::create_directories(dir);
  const std::string header = output_header(config.hash());
  {
    auto out = open_output(dir / "correlations.csv");
    write_correlation_csv(out, report, header);
  }
  {
    auto out = open_output(dir / "correlations.txt");
    write_correlation_text(out, report, header);
  }
  write_text(dir / "correlations.json", correlation_json(report, config.hash()));

  for (const std::string& region : table.regions) {
    {
      auto out = open_output(dir / ("scatter_" + region + ".csv"));
      out << header << '\n' << "resource,traderisk,volatility,csr\n";
      for (const auto& [key, row] : table.regional) {
        if (key.region != region) continue;
        std::optional<double> csr;
        if (auto it = table.global.find(key.resource); it != table.global.end()) {
          csr = it->second.csr;
        }
        out << csv::escape(key.resource) << ',' << csv::format_optional(row.traderisk) << ','
            << csv::format_optional(row.volatility) << ',' << csv::format_optional(csr) << '\n';
      }
    }
    auto out = open_output(dir / ("ranks_" + region + ".csv"));
    out << header << '\n' << "rank,resource,traderisk\n";
    std::size_t rank = 0;
    for (const auto& [resource, tr] : rank_by_traderisk(table, region)) {
      out << ++rank << ',' << csv::escape(resource) << ',' << csv::format_double(tr) << '\n';
    }
  }
}

void write_nullmodel_outputs(const std::filesystem::path& dir,
                             const std::vector<NullModelResult>& results, const Config& config) {
  std::filesystem::create_directories(dir);
  const std::string header = output_header(config.hash());
  std::vector<nullmodels::EnsembleSummary> summaries;
  for (const auto& r : results) summaries.push_back(r.summary);
  {
    auto out = open_output(dir / "nullmodel_summary.csv");
    write_ensemble_csv(out, summaries, header);
  }
  for (const auto& r : results) {
    const std::string scheme(nullmodels::to_string(r.summary.scheme));
    const EnsembleTag tag{scheme, r.summary.realizations};
    {
      auto out = open_output(dir / ("global_" + scheme + ".csv"));
      write_global_csv(out, r.mean_table, header, &tag);
    }
    {
      auto out = open_output(dir / ("regional_" + scheme + ".csv"));
      write_regional_csv(out, r.mean_table, header, &tag);
    }
    {
      auto out = open_output(dir / ("correlations_" + scheme + ".csv"));
      write_correlation_csv(out, r.mean_report, header);
    }
    auto out = open_output(dir / ("correlations_" + scheme + ".txt"));
    write_correlation_text(out, r.mean_report, header);
  }
}

}  // namespace traderisk
