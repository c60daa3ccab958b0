#include <benchmark/benchmark.h>

#include <filesystem>
#include <random>

#include "traderisk/config.hpp"
#include "traderisk/graph.hpp"
#include "traderisk/indicators.hpp"
#include "traderisk/ingest.hpp"
#include "traderisk/nullmodels.hpp"
#include "traderisk/pipeline.hpp"

namespace {

using namespace traderisk;

// Column-normalized random layer, like a vulnerability network.
Layer random_vulnerability(std::size_t n, double density, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Edge> edges;
  std::vector<double> column(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && u(gen) < density) {
        edges.push_back({i, j, u(gen)});
        column[j] += edges.back().weight;
      }
    }
  }
  for (auto& e : edges) e.weight *= 0.5 / column[e.target];
  return Layer(n, std::move(edges));
}

const TradeFlowPanel& fixture_panel() {
  static const TradeFlowPanel panel = [] {
    const std::filesystem::path dir = TRADERISK_FIXTURE_DIR;
    return parse_files(dir / "trade.csv", dir / "countries.csv", dir / "resources.csv");
  }();
  return panel;
}

void BM_LeadingEigenvalue(benchmark::State& state) {
  const Layer v = random_vulnerability(static_cast<std::size_t>(state.range(0)), 0.1, 1);
  for (auto _ : state) benchmark::DoNotOptimize(graph::leading_eigenvalue(v));
}
BENCHMARK(BM_LeadingEigenvalue)->Arg(20)->Arg(200)->Arg(1000);

void BM_PageRank(benchmark::State& state) {
  const Layer v = random_vulnerability(static_cast<std::size_t>(state.range(0)), 0.1, 2);
  for (auto _ : state) benchmark::DoNotOptimize(graph::pagerank(v));
}
BENCHMARK(BM_PageRank)->Arg(20)->Arg(200)->Arg(1000);

void BM_SccFraction(benchmark::State& state) {
  const Layer v = random_vulnerability(static_cast<std::size_t>(state.range(0)), 0.02, 3);
  for (auto _ : state) benchmark::DoNotOptimize(graph::largest_scc_fraction(v));
}
BENCHMARK(BM_SccFraction)->Arg(200)->Arg(5000);

void BM_FixtureIndicators(benchmark::State& state) {
  const Config config = Config::defaults();
  const PreparedPanels prepared = prepare_panels(fixture_panel(), config);
  for (auto _ : state) benchmark::DoNotOptimize(compute_indicators(prepared, config));
}
BENCHMARK(BM_FixtureIndicators)->Unit(benchmark::kMillisecond);

void BM_NullModelRealization(benchmark::State& state) {
  Config config = Config::defaults();
  config.realizations = 1;
  const PreparedPanels prepared = prepare_panels(fixture_panel(), config);
  const IndicatorTable real = compute_indicators(prepared, config);
  const auto scheme = nullmodels::kSchemes[state.range(0)];
  state.SetLabel(std::string(nullmodels::to_string(scheme)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_null_model(prepared, real, scheme, config));
  }
}
BENCHMARK(BM_NullModelRealization)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
