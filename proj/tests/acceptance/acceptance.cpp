// Acceptance checks. Prints one PASS/FAIL/SKIP line per criterion and exits
// non-zero when any criterion fails.
//
//   traderisk_acceptance --cli <path to traderisk> --work <scratch dir>

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "support/oracles.hpp"
#include "traderisk/config.hpp"
#include "traderisk/csv.hpp"
#include "traderisk/graph.hpp"
#include "traderisk/indicators.hpp"
#include "traderisk/ingest.hpp"
#include "traderisk/nullmodels.hpp"
#include "traderisk/pipeline.hpp"
#include "traderisk/stats.hpp"

namespace {

using namespace traderisk;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* format, double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, format, value);
  return buffer;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

const TradeFlowPanel& fixture_panel() {
  static const TradeFlowPanel panel = [] {
    const fs::path dir = TRADERISK_FIXTURE_DIR;
    return parse_files(dir / "trade.csv", dir / "countries.csv", dir / "resources.csv");
  }();
  return panel;
}

// Random trade layer turned into a vulnerability network with random PS.
Layer random_vulnerability(std::mt19937_64& gen, std::size_t n, double density) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<CountryRecord> countries(n);
  for (std::size_t i = 0; i < n; ++i) {
    countries[i].id = (i < 10 ? "C0" : "C") + std::to_string(i);
    countries[i].ps_by_year[2000] = 100.0 * u(gen);
  }
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && u(gen) < density) edges.push_back({i, j, 1.0 + 999.0 * u(gen)});
    }
  }
  TradeFlowPanel p;
  p.countries = CountryRegistry(std::move(countries));
  ResourceRecord r;
  r.id = "R";
  p.resources = ResourceRegistry({r});
  p.years = {2000};
  p.value_usd.emplace(LayerKey{"R", 2000}, Layer(n, std::move(edges)));
  return vulnerability_network(p, "R", 2000, StabilityMode::ps).weights;
}

Outcome pagerank_oracle() {
  const auto start = Clock::now();
  std::mt19937_64 gen(20240101);
  std::uniform_int_distribution<std::size_t> size(2, 20);
  std::uniform_real_distribution<double> density(0.05, 0.5);
  std::size_t checked = 0, degenerate = 0;
  double worst = 0.0;
  for (auto flow : {graph::PageRankFlow::downstream, graph::PageRankFlow::upstream}) {
    std::size_t per_flow = 0;
    while (per_flow < 200) {
      const Layer v = random_vulnerability(gen, size(gen), density(gen));
      graph::PageRankOptions options;
      options.flow = flow;
      const auto r = graph::pagerank(v, options);
      if (r.degenerate) {
        ++degenerate;
        continue;
      }
      const auto x = oracle::pagerank_solve(v, options.alpha_factor, flow);
      for (std::size_t i = 0; i < r.scores.size(); ++i) {
        worst = std::max(worst, std::abs(r.scores[i] - x(static_cast<Eigen::Index>(i))));
      }
      ++per_flow;
      ++checked;
    }
  }
  const double elapsed = seconds_since(start);
  return {worst <= 1e-8 && elapsed < 10.0,
          std::to_string(checked) + " layers (both flows, " + std::to_string(degenerate) +
              " acyclic skipped), max err " + fmt("%.2e", worst) + ", " + fmt("%.2f", elapsed) +
              " s"};
}

Outcome eigenvalue_oracle() {
  const auto start = Clock::now();
  std::mt19937_64 gen(20240102);
  std::uniform_int_distribution<std::size_t> size(1, 4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0, worst_homogeneity = 0.0;
  const std::size_t count = 1000;
  for (std::size_t trial = 0; trial < count; ++trial) {
    const std::size_t n = size(gen);
    const double density = u(gen);
    std::vector<Edge> edges, scaled;
    const double c = 0.1 + 10.0 * u(gen);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (u(gen) < density) {
          const double w = u(gen);
          edges.push_back({i, j, w});
          scaled.push_back({i, j, c * w});
        }
      }
    }
    const Layer a(n, edges);
    const double lambda = graph::leading_eigenvalue(a);
    worst = std::max(worst, std::abs(lambda - oracle::characteristic_root(oracle::dense(a))));
    worst_homogeneity =
        std::max(worst_homogeneity, std::abs(graph::leading_eigenvalue(Layer(n, scaled)) - c * lambda));
  }
  const double elapsed = seconds_since(start);
  return {worst <= 1e-8 && worst_homogeneity <= 1e-10 && elapsed < 5.0,
          std::to_string(count) + " matrices n<=4, max err " + fmt("%.2e", worst) +
              ", homogeneity err " + fmt("%.2e", worst_homogeneity) + ", " +
              fmt("%.2f", elapsed) + " s"};
}

bool scc_agrees(std::size_t n, const std::vector<std::vector<bool>>& adj) {
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (adj[i][j]) edges.push_back({i, j, 1.0});
    }
  }
  return graph::largest_scc_fraction(Layer(n, std::move(edges))) ==
         oracle::scc_fraction_bruteforce(n, adj);
}

Outcome scc_exhaustive() {
  std::size_t exhaustive = 0, sampled = 0, mismatches = 0;
  for (std::size_t n = 1; n <= 3; ++n) {
    const std::size_t cells = n * (n - 1);
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << cells); ++mask) {
      std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
      std::size_t bit = 0;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          if (i != j) adj[i][j] = (mask >> bit++) & 1;
        }
      }
      mismatches += !scc_agrees(n, adj);
      ++exhaustive;
    }
  }
  std::mt19937_64 gen(20240103);
  std::uniform_int_distribution<std::size_t> size(1, 5);
  std::bernoulli_distribution coin(0.5);
  for (; sampled < 10000; ++sampled) {
    const std::size_t n = size(gen);
    std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i != j) adj[i][j] = coin(gen);
      }
    }
    mismatches += !scc_agrees(n, adj);
  }
  return {mismatches == 0, std::to_string(exhaustive) + " exhaustive + " +
                               std::to_string(sampled) + " sampled graphs, " +
                               std::to_string(mismatches) + " mismatches"};
}

Outcome partial_oracle() {
  std::mt19937_64 gen(20240104);
  std::normal_distribution<double> n01(0.0, 1.0);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  double worst = 0.0;
  const std::size_t count = 1000;
  for (std::size_t trial = 0; trial < count; ++trial) {
    std::vector<double> x(50), y(50), z(50);
    const double a = coef(gen), b = coef(gen), c = coef(gen);
    for (std::size_t k = 0; k < 50; ++k) {
      z[k] = n01(gen);
      x[k] = a * z[k] + n01(gen);
      y[k] = b * z[k] + c * x[k] + n01(gen);
    }
    const auto r = stats::partial_pearson(std::span<const double>(x), std::span<const double>(y),
                                          std::span<const double>(z));
    worst = std::max(worst, std::abs(*r.rho - oracle::partial_by_residuals(x, y, z)));
  }
  // orthogonal cases: z is +-1 on paired points, x and y are symmetric in
  // each pair, so z is uncorrelated with both
  double worst_trivial = 0.0;
  for (std::size_t trial = 0; trial < 100; ++trial) {
    std::vector<double> x, y, z;
    for (std::size_t k = 0; k < 25; ++k) {
      const double xv = n01(gen), yv = n01(gen);
      for (double sign : {1.0, -1.0}) {
        x.push_back(xv);
        y.push_back(yv);
        z.push_back(sign * (1.0 + k % 3));
      }
    }
    const auto partial = stats::partial_pearson(
        std::span<const double>(x), std::span<const double>(y), std::span<const double>(z));
    const auto plain = stats::pearson(std::span<const double>(x), std::span<const double>(y));
    worst_trivial = std::max(worst_trivial, std::abs(*partial.rho - *plain.rho));
  }
  return {worst <= 1e-12 && worst_trivial <= 1e-12,
          std::to_string(count) + " triples, max err " + fmt("%.2e", worst) +
              ", orthogonal reduction err " + fmt("%.2e", worst_trivial)};
}

std::vector<double> sorted_weights(const Layer& l) {
  std::vector<double> w;
  for (const Edge& e : l.edges()) w.push_back(e.weight);
  std::sort(w.begin(), w.end());
  return w;
}

bool invariant_holds(nullmodels::Scheme scheme, const Layer& before, const Layer& after) {
  switch (scheme) {
    case nullmodels::Scheme::fix_degree:
      return after.edge_count() == before.edge_count() &&
             after.total_weight() == before.total_weight() &&
             sorted_weights(after) == sorted_weights(before);
    case nullmodels::Scheme::fix_in_degree:
      return graph::degrees_and_strengths(after).in_strength ==
             graph::degrees_and_strengths(before).in_strength;
    case nullmodels::Scheme::fix_in_out_degree: {
      if (after.edge_count() != before.edge_count()) return false;
      for (std::size_t k = 0; k < before.edge_count(); ++k) {
        if (after.edges()[k].source != before.edges()[k].source ||
            after.edges()[k].target != before.edges()[k].target) {
          return false;
        }
      }
      return sorted_weights(after) == sorted_weights(before);
    }
  }
  return false;
}

Outcome nullmodel_invariants() {
  const auto start = Clock::now();
  Config config = Config::defaults();
  const PreparedPanels prepared = prepare_panels(fixture_panel(), config);
  std::size_t layers = 0, broken = 0;
  for (auto scheme : nullmodels::kSchemes) {
    for (std::uint64_t r = 0; r < 100; ++r) {
      const auto randomized = nullmodels::randomize_panel(prepared.global, scheme, config.seed, r);
      for (const auto& [key, layer] : prepared.global.value_usd) {
        broken += !invariant_holds(scheme, layer, randomized.value_usd.at(key));
        ++layers;
      }
    }
  }

  // correlations that involve only IR and unrandomized columns
  const IndicatorTable real = compute_indicators(prepared, config);
  const CorrelationReport real_report = compute_correlations(real);
  std::size_t ir_entries = 0, ir_differences = 0;
  for (auto scheme : nullmodels::kSchemes) {
    const auto result = run_null_model(prepared, real, scheme, config);
    for (std::size_t k = 0; k < real_report.entries.size(); ++k) {
      const auto& e = real_report.entries[k];
      if (e.x_name.rfind("import_reliance@", 0) != 0) continue;
      const auto& m = result.mean_report.entries.at(k);
      ++ir_entries;
      ir_differences += m.rho != e.rho || m.p_value != e.p_value || m.n != e.n;
    }
  }
  return {broken == 0 && ir_entries > 0 && ir_differences == 0,
          std::to_string(layers) + " randomized layers, " + std::to_string(broken) +
              " invariant violations; " + std::to_string(ir_entries) +
              " IR correlations across schemes, " + std::to_string(ir_differences) +
              " differ; " + fmt("%.1f", seconds_since(start)) + " s"};
}

const CorrelationEntry* find_entry(const CorrelationReport& report, const std::string& x,
                                   const std::string& y) {
  for (const auto& e : report.entries) {
    if (e.x_name == x && e.y_name == y) return &e;
  }
  return nullptr;
}

Outcome network_effect() {
  const IndicatorTable table = compute_indicators(fixture_panel(), Config::defaults());
  const CorrelationReport report = compute_correlations(table);
  const auto* ls = find_entry(report, "lambda", "scarcity");
  const auto* tr = find_entry(report, "traderisk@EU", "volatility@EU");
  const auto* str = find_entry(report, "instrength_traderisk@EU", "volatility@EU");
  if (!ls || !tr || !str || !ls->rho || !tr->rho || !str->rho) {
    return {false, "correlations unavailable"};
  }
  const bool pass = *ls->rho > 0.0 && *ls->p_value < 0.05 && *tr->rho > 0.0 &&
                    *tr->p_value < 0.05 && *tr->rho > *str->rho;
  return {pass, "corr(S,lambda)=" + fmt("%.3f", *ls->rho) + " (p=" + fmt("%.1e", *ls->p_value) +
                    ", n=" + std::to_string(ls->n) + "); corr(TR_EU,sigma)=" +
                    fmt("%.3f", *tr->rho) + " (p=" + fmt("%.1e", *tr->p_value) +
                    ") > corr(TRstr_EU,sigma)=" + fmt("%.3f", *str->rho) + " (p=" +
                    fmt("%.1e", *str->p_value) + ")"};
}

int shell(const std::string& command) { return std::system(command.c_str()); }

std::string quote(const fs::path& p) { return "'" + p.string() + "'"; }

// Rows keyed by their leading text fields, plus the header row.
struct Shape {
  std::vector<std::string> header;
  std::vector<std::string> keys;
  std::vector<std::string> values;
};

Shape shape_of(const fs::path& file) {
  std::ifstream in(file);
  csv::Reader reader(in, file.string());
  Shape s;
  std::vector<std::string> fields;
  if (reader.next(fields)) s.header = fields;
  while (reader.next(fields)) {
    std::string key, values;
    for (const auto& f : fields) {
      if (csv::parse_double(f) || f.empty()) {
        values += f + ",";
      } else {
        key += f + ",";
      }
    }
    s.keys.push_back(key);
    s.values.push_back(values);
  }
  return s;
}

Outcome stability_variants(const fs::path& cli, const fs::path& work, const fs::path& archive) {
  std::string detail;
  bool pass = true;
  const auto base = work / "variant_ps";
  if (shell(quote(cli) + " indicators --archive " + quote(archive) + " --out " + quote(base) +
            " > /dev/null") != 0) {
    return {false, "default run failed"};
  }
  for (const char* mode : {"none", "rgi"}) {
    const auto dir = work / (std::string("variant_") + mode);
    const int code = shell(quote(cli) + " indicators --archive " + quote(archive) + " --out " +
                           quote(dir) + " --stability " + mode + " > /dev/null");
    if (code != 0) {
      pass = false;
      detail += std::string(mode) + ": exit " + std::to_string(code) + "; ";
      continue;
    }
    for (const char* table : {"global.csv", "regional.csv"}) {
      const Shape a = shape_of(base / table), b = shape_of(dir / table);
      const bool same_structure = a.header == b.header && a.keys == b.keys;
      const bool different_values = a.values != b.values;
      pass = pass && same_structure && different_values;
      detail += std::string(mode) + "/" + table + ": " + std::to_string(b.keys.size()) + " rows " +
                (same_structure ? "same structure" : "STRUCTURE DIFFERS") + ", " +
                (different_values ? "values differ" : "VALUES IDENTICAL") + "; ";
    }
  }
  return {pass, detail};
}

Outcome determinism(const fs::path& cli, const fs::path& work) {
  const fs::path fixture = TRADERISK_FIXTURE_DIR;
  std::vector<double> times;
  for (const char* name : {"run_a", "run_b"}) {
    const auto dir = work / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    const auto start = Clock::now();
    const int ingest = shell(quote(cli) + " ingest --trade " + quote(fixture / "trade.csv") +
                             " --countries " + quote(fixture / "countries.csv") +
                             " --resources " + quote(fixture / "resources.csv") + " --out " +
                             quote(dir / "fixture.trp") + " > /dev/null");
    const int report = shell(quote(cli) + " --seed 7 report --archive " +
                             quote(dir / "fixture.trp") + " --out " + quote(dir / "report") +
                             " > /dev/null");
    times.push_back(seconds_since(start));
    if (ingest != 0 || report != 0) return {false, std::string(name) + " failed"};
  }
  std::size_t files = 0, differing = 0;
  for (const auto& entry : fs::recursive_directory_iterator(work / "run_a")) {
    if (!entry.is_regular_file()) continue;
    const auto other = work / "run_b" / fs::relative(entry.path(), work / "run_a");
    ++files;
    differing += !fs::exists(other) || slurp(entry.path()) != slurp(other);
  }
  std::size_t files_b = 0;
  for (const auto& entry : fs::recursive_directory_iterator(work / "run_b")) {
    files_b += entry.is_regular_file();
  }
  const double slowest = std::max(times[0], times[1]);
  return {differing == 0 && files == files_b && slowest < 60.0,
          std::to_string(files) + " files, " + std::to_string(differing) +
              " differ; full pipeline " + fmt("%.1f", times[0]) + " s and " +
              fmt("%.1f", times[1]) + " s"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  std::string cli, work;
  app.add_option("--cli", cli, "traderisk executable")->required();
  app.add_option("--work", work, "scratch directory")->required();
  CLI11_PARSE(app, argc, argv);

  const fs::path work_dir = work;
  fs::remove_all(work_dir);
  fs::create_directories(work_dir);

  int failed = 0;
  auto report = [&failed](int id, const std::string& name, const std::function<Outcome()>& check) {
    Outcome outcome;
    try {
      outcome = check();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    failed += !outcome.pass;
    std::printf("%s %d %s: %s\n", outcome.pass ? "PASS" : "FAIL", id, name.c_str(),
                outcome.detail.c_str());
    std::fflush(stdout);
  };

  report(1, "pagerank-oracle", pagerank_oracle);
  report(2, "eigenvalue-oracle", eigenvalue_oracle);
  report(3, "scc-exhaustive", scc_exhaustive);
  report(4, "partial-correlation-oracle", partial_oracle);
  report(5, "nullmodel-invariants", nullmodel_invariants);
  report(6, "network-effect", network_effect);

  const fs::path fixture = TRADERISK_FIXTURE_DIR;
  const fs::path archive = work_dir / "fixture.trp";
  const int ingested = shell("'" + cli + "' ingest --trade " + quote(fixture / "trade.csv") +
                             " --countries " + quote(fixture / "countries.csv") +
                             " --resources " + quote(fixture / "resources.csv") + " --out " +
                             quote(archive) + " > /dev/null");
  report(7, "stability-variants", [&] {
    if (ingested != 0) return Outcome{false, "ingest failed"};
    return stability_variants(cli, work_dir, archive);
  });
  report(8, "determinism", [&] { return determinism(cli, work_dir); });
  std::printf("SKIP 9 real-data-anchors: manual procedure, needs user-supplied trade data\n");

  return failed == 0 ? 0 : 1;
}
