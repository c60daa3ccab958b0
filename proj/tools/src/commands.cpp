#include "traderisk_cli/commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "traderisk/archive.hpp"
#include "traderisk/config.hpp"
#include "traderisk/error.hpp"
#include "traderisk/fixture.hpp"
#include "traderisk/ingest.hpp"
#include "traderisk/pipeline.hpp"
#include "traderisk/tables.hpp"

namespace traderisk::cli {

namespace fs = std::filesystem;

namespace {

/// Flag values are collected as strings keyed by config key and applied on
/// top of the config file, so flags and file share one validation path.
struct Overrides {
  std::map<std::string, std::string> values;

  void add(CLI::App* app, const std::string& flag, const std::string& key,
           const std::string& help) {
    app->add_option_function<std::string>(
        flag, [this, key](const std::string& v) { values[key] = v; }, help);
  }
};

void add_indicator_flags(CLI::App* cmd, Overrides& o) {
  o.add(cmd, "--regions", "regions", "comma-separated regions, e.g. EU,US");
  o.add(cmd, "--stability", "stability", "exporter score: ps, rgi or none");
  o.add(cmd, "--alpha-factor", "alpha_factor", "PageRank factor, alpha = factor / lambda");
  o.add(cmd, "--threshold", "threshold", "minimum import share kept");
  o.add(cmd, "--pagerank-scale", "pagerank_scale", "unit-sum or raw");
  o.add(cmd, "--pagerank-flow", "pagerank_flow", "shock direction: downstream or upstream");
  o.add(cmd, "--years", "years", "year range FIRST:LAST");
  o.add(cmd, "--tol", "tol", "convergence tolerance");
  o.add(cmd, "--max-iter", "max_iter", "iteration limit");
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path.string(), 0, "cannot open file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::vector<nullmodels::Scheme> schemes_from(const std::string& text) {
  if (text == "all") return {std::begin(nullmodels::kSchemes), std::end(nullmodels::kSchemes)};
  std::vector<nullmodels::Scheme> out;
  for (const auto& item : split_list(text, ',')) {
    std::string lower = item;
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    auto scheme = nullmodels::parse_scheme(lower);
    if (!scheme) {
      throw InputError("invalid scheme '" + item +
                       "' (expected fix-degree, fix-in-deg, fix-in-out-deg or all)");
    }
    out.push_back(*scheme);
  }
  if (out.empty()) throw InputError("no scheme given");
  return out;
}

int status_of(const IndicatorTable& table, std::ostream& err) {
  if (table.failures == 0) return kSuccess;
  err << "warning: " << table.failures << " computation(s) did not converge\n";
  return kDegenerate;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Supply-risk indicators from bilateral trade networks", "traderisk"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(tool_version()));

  std::string config_path;
  Overrides overrides;
  app.add_option("--config", config_path,
                 std::string("config file (default: $") + kConfigEnvVar + ")");
  overrides.add(&app, "--seed", "seed", "base seed for null models");
  overrides.add(&app, "--jobs", "jobs", "worker threads");

  std::string trade, countries, resources, archive, out_path, indicators_path, scheme = "all";
  std::size_t fixture_resources = 40;
  std::uint64_t fixture_seed = FixtureOptions{}.seed;

  auto* ingest = app.add_subcommand("ingest", "reconcile input CSVs into a panel archive");
  ingest->fallthrough();
  ingest->add_option("--trade", trade, "trade records CSV")->required();
  ingest->add_option("--countries", countries, "countries CSV")->required();
  ingest->add_option("--resources", resources, "resources CSV")->required();
  ingest->add_option("--out", out_path, "archive file to write")->required();
  overrides.add(ingest, "--years", "years", "year range FIRST:LAST");

  auto* indicators = app.add_subcommand("indicators", "global and regional indicator tables");
  indicators->fallthrough();
  indicators->add_option("--archive", archive, "panel archive")->required();
  indicators->add_option("--out", out_path, "output directory")->required();
  add_indicator_flags(indicators, overrides);

  auto* nullmodel = app.add_subcommand("nullmodel", "ensemble indicators on randomized panels");
  nullmodel->fallthrough();
  nullmodel->add_option("--archive", archive, "panel archive")->required();
  nullmodel->add_option("--out", out_path, "output directory")->required();
  nullmodel->add_option("--scheme", scheme,
                        "fix-degree, fix-in-deg, fix-in-out-deg, a comma list, or all");
  overrides.add(nullmodel, "--realizations", "realizations", "realizations per scheme");
  add_indicator_flags(nullmodel, overrides);

  auto* correlate = app.add_subcommand("correlate", "correlation report, scatter and rank data");
  correlate->fallthrough();
  correlate->add_option("--indicators", indicators_path,
                        "indicators.json or the directory holding it")
      ->required();
  correlate->add_option("--out", out_path, "output directory")->required();

  auto* report = app.add_subcommand("report", "indicators, correlations and null models");
  report->fallthrough();
  report->add_option("--archive", archive, "panel archive")->required();
  report->add_option("--out", out_path, "output directory")->required();
  report->add_option("--scheme", scheme, "null-model schemes, or none");
  overrides.add(report, "--realizations", "realizations", "realizations per scheme");
  add_indicator_flags(report, overrides);

  auto* fixture = app.add_subcommand("fixture", "write the synthetic fixture CSVs");
  fixture->fallthrough();
  fixture->add_option("--out", out_path, "output directory")->required();
  fixture->add_option("--resources", fixture_resources, "number of resources");
  fixture->add_option("--fixture-seed", fixture_seed, "generator seed");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kInputError;
  }

  try {
    Config config = Config::defaults();
    if (config_path.empty()) {
      if (const char* env = std::getenv(kConfigEnvVar); env && *env) config_path = env;
    }
    if (!config_path.empty()) config = load_config(config_path, config);
    for (const auto& [key, value] : overrides.values) {
      try {
        config.set(key, value);
      } catch (const InputError& e) {
        throw InputError(std::string("command line: ") + e.what());
      }
    }
    const std::string header = output_header(config.hash());

    if (*ingest) {
      IngestConfig ingest_config;
      ingest_config.years = config.years;
      const TradeFlowPanel panel = parse_files(trade, countries, resources, ingest_config);
      write_archive(out_path, panel, header.substr(2));
      out << "wrote " << out_path << " checksum fnv1a64:" << panel_checksum(panel) << '\n';
      return kSuccess;
    }

    if (*fixture) {
      FixtureOptions options;
      options.resources = fixture_resources;
      options.seed = fixture_seed;
      write_fixture(out_path, generate_fixture(options));
      out << "wrote fixture to " << out_path << '\n';
      return kSuccess;
    }

    if (*correlate) {
      fs::path path = indicators_path;
      if (fs::is_directory(path)) path /= "indicators.json";
      const IndicatorTable table = parse_indicator_table_json(read_file(path), path.string());
      write_correlation_outputs(out_path, compute_correlations(table), table, config);
      out << "wrote correlations to " << out_path << '\n';
      return kSuccess;
    }

    const TradeFlowPanel panel = read_archive(archive);
    const PreparedPanels prepared = prepare_panels(panel, config);
    const IndicatorTable table = compute_indicators(prepared, config);

    if (*indicators) {
      write_indicator_outputs(out_path, table, config);
      out << "wrote indicators to " << out_path << '\n';
      return status_of(table, err);
    }

    auto run_schemes = [&](const std::vector<nullmodels::Scheme>& schemes, const fs::path& dir) {
      std::vector<NullModelResult> results;
      std::size_t failed = 0;
      for (auto s : schemes) {
        results.push_back(run_null_model(prepared, table, s, config));
        failed += results.back().summary.failed + results.back().mean_table.failures;
      }
      write_nullmodel_outputs(dir, results, config);
      return failed;
    };

    if (*nullmodel) {
      const std::size_t failed = run_schemes(schemes_from(scheme), out_path);
      out << "wrote null-model ensembles to " << out_path << '\n';
      if (failed > 0) {
        err << "warning: " << failed << " realization(s) failed\n";
        return kDegenerate;
      }
      return status_of(table, err);
    }

    // report
    const fs::path root = out_path;
    write_indicator_outputs(root / "indicators", table, config);
    write_correlation_outputs(root / "correlations", compute_correlations(table), table, config);
    std::size_t failed = 0;
    if (scheme != "none") failed = run_schemes(schemes_from(scheme), root / "nullmodels");
    out << "wrote report to " << out_path << '\n';
    if (failed > 0) {
      err << "warning: " << failed << " realization(s) failed\n";
      return kDegenerate;
    }
    return status_of(table, err);
  } catch (const ConvergenceError& e) {
    err << "error: " << e.what() << '\n';
    return kDegenerate;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }
}

}  // namespace traderisk::cli
