#include "traderisk/fixture.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include "traderisk/error.hpp"
#include "traderisk/nullmodels.hpp"

namespace traderisk {

namespace {

class Draw {
 public:
  explicit Draw(std::uint64_t seed) : rng_(seed) {}

  double uniform() { return static_cast<double>(rng_.next() >> 11) * 0x1p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(rng_.below(n)); }
  bool chance(double p) { return uniform() < p; }

  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  /// k distinct picks from `pool`.
  std::vector<std::string> pick(std::vector<std::string> pool, std::size_t k) {
    k = std::min(k, pool.size());
    for (std::size_t i = 0; i < k; ++i) std::swap(pool[i], pool[i + below(pool.size() - i)]);
    pool.resize(k);
    return pool;
  }

 private:
  nullmodels::Rng rng_;
};

struct CountrySpec {
  const char* id;
  double ps;
  double rgi;  // < 0: missing
  bool eu;
};

constexpr CountrySpec kCountries[] = {
    {"AU", 88, 75, false}, {"BR", 42, 55, false}, {"CA", 86, 78, false}, {"CD", 4, 20, false},
    {"CL", 66, 70, false}, {"CN", 30, 40, false}, {"DE", 80, -1, true},  {"ES", 55, -1, true},
    {"FR", 68, -1, true},  {"ID", 24, 45, false}, {"IN", 22, 50, false}, {"IT", 62, -1, true},
    {"JP", 82, -1, false}, {"KR", 64, -1, false}, {"KZ", 45, 35, false}, {"MX", 28, 52, false},
    {"NL", 83, -1, true},  {"PL", 72, -1, true},  {"RU", 20, 38, false}, {"TR", 18, -1, false},
    {"US", 66, 72, false}, {"ZA", 44, 60, false},
};

constexpr const char* kHubs[] = {"CN", "CD", "RU"};
constexpr const char* kLowStability[] = {"CD", "RU", "CN", "TR", "IN", "ID", "MX"};
constexpr const char* kIntermediaries[] = {"BR", "ZA", "KZ"};
constexpr const char* kProcessors[] = {"JP", "KR", "US"};

constexpr const char* kResources[] = {
    "ALUMINUM",  "ANTIMONY",  "ARSENIC",   "BARITE",   "BAUXITE",   "BERYLLIUM", "BISMUTH",
    "BORON",     "CADMIUM",   "CHROMIUM",  "COBALT",   "COPPER",    "FLUORSPAR", "GALLIUM",
    "GERMANIUM", "GOLD",      "GRAPHITE",  "INDIUM",   "IRON",      "LEAD",      "LITHIUM",
    "MAGNESIUM", "MANGANESE", "MERCURY",   "MOLYBDENUM", "NICKEL",  "NIOBIUM",   "PLATINUM",
    "PALLADIUM", "RARE_EARTHS", "RHENIUM", "SELENIUM", "SILVER",    "TANTALUM",  "TELLURIUM",
    "TIN",       "TITANIUM",  "TUNGSTEN",  "VANADIUM", "ZINC",
};

bool contains(const std::vector<std::string>& v, const std::string& x) {
  return std::find(v.begin(), v.end(), x) != v.end();
}

struct Supplier {
  std::string exporter;
  double share;
};

}  // namespace

Fixture generate_fixture(const FixtureOptions& options) {
  if (options.resources == 0 || options.resources > std::size(kResources)) {
    throw std::invalid_argument("fixture: resources must lie in [1, " +
                                std::to_string(std::size(kResources)) + "]");
  }
  if (options.last_year <= options.first_year) {
    throw std::invalid_argument("fixture: need at least two years");
  }
  const int years = options.last_year - options.first_year + 1;

  std::vector<std::string> all, eu, non_eu;
  for (const auto& c : kCountries) {
    all.emplace_back(c.id);
    (c.eu ? eu : non_eu).emplace_back(c.id);
  }

  Fixture fx;

  {
    Draw draw(nullmodels::derive_seed(options.seed, "fixture/countries", 0, 0));
    std::vector<CountryRecord> countries;
    for (const auto& spec : kCountries) {
      CountryRecord c;
      c.id = spec.id;
      for (int y = options.first_year; y <= options.last_year; ++y) {
        const double ps = std::clamp(spec.ps + 2.0 * draw.normal(), 0.0, 100.0);
        // patchy coverage: the first two years are missing for KZ
        if (c.id == "KZ" && y < options.first_year + 2) continue;
        c.ps_by_year[y] = std::round(ps * 100.0) / 100.0;
      }
      if (spec.rgi >= 0.0) c.rgi = spec.rgi;
      if (spec.eu) c.region_tags.insert("EU");
      countries.push_back(std::move(c));
    }
    fx.countries = CountryRegistry(std::move(countries));
  }

  std::vector<ResourceRecord> resources;
  for (std::size_t k = 0; k < options.resources; ++k) {
    const std::string id = kResources[k];
    Draw draw(nullmodels::derive_seed(options.seed, "fixture/" + id, 0, 0));

    double c = draw.uniform(0.1, 0.9);
    double e = draw.uniform(0.1, 0.9);
    // one resource where a single exporter holds 85% of every importer's supply
    const bool dominant = id == "BERYLLIUM";
    if (dominant) {
      c = 0.85;
      e = 0.9;
    }
    const std::string hub = kHubs[draw.below(std::size(kHubs))];
    const double target_scarcity = -14.0 + 10.0 * c + 0.7 * draw.normal();
    const int start_year = k % 13 == 5 ? options.first_year + 3 : options.first_year;
    const double base_price = std::exp(draw.uniform(0.0, 7.0));

    ResourceRecord r;
    r.id = id;
    const double ir_draw = draw.uniform(0.1, 1.0);
    const double ir_eu = dominant ? 1.0 : ir_draw;
    const double ir_us = draw.uniform(0.0, 0.9);
    if (k % 17 != 3) r.import_reliance["EU"] = std::round(ir_eu * 1000.0) / 1000.0;
    if (k % 19 != 7) r.import_reliance["US"] = std::round(ir_us * 1000.0) / 1000.0;
    r.trade_barriers["EU"] = std::round(draw.uniform(0.0, 0.25) * 1000.0) / 1000.0;
    r.trade_barriers["US"] = std::round(draw.uniform(0.0, 0.25) * 1000.0) / 1000.0;
    r.classification = static_cast<Classification>(k % 3);
    auto score = [&](double scale) {
      return std::round(scale * std::clamp(0.3 + 0.5 * c + 0.1 * draw.normal(), 0.0, 1.0) * 100.0) /
             100.0;
    };
    if (draw.chance(0.5)) r.supply_risk[SupplyRiskSource::nrc] = score(10.0);
    if (draw.chance(0.85)) r.supply_risk[SupplyRiskSource::bgs] = score(10.0);
    if (draw.chance(0.65)) r.supply_risk[SupplyRiskSource::ec] = score(5.0);

    // EU export price: log random walk, step size grows with IR_EU and e.
    const double sigma_eu = 0.03 + 0.25 * (k % 17 != 3 ? ir_eu : 0.5) * (0.2 + e);
    const double sigma_world = draw.uniform(0.05, 0.15);
    std::vector<double> price_eu(years), price_world(years);
    price_eu[0] = base_price * draw.uniform(0.8, 1.2);
    price_world[0] = base_price;
    for (int t = 1; t < years; ++t) {
      price_eu[t] = price_eu[t - 1] * std::exp(sigma_eu * draw.normal());
      price_world[t] = price_world[t - 1] * std::exp(sigma_world * draw.normal());
    }
    std::map<std::string, double> exporter_markup;
    for (const auto& id_c : non_eu) exporter_markup[id_c] = std::exp(0.05 * draw.normal());

    // Supply structure, fixed over the years.
    std::map<std::string, std::vector<Supplier>> suppliers;
    std::map<std::string, double> demand;
    const std::vector<std::string> low_stability(std::begin(kLowStability), std::end(kLowStability));
    const std::vector<std::string> intermediaries(std::begin(kIntermediaries),
                                                  std::end(kIntermediaries));
    const std::vector<std::string> processors(std::begin(kProcessors), std::end(kProcessors));
    for (const std::string& j : all) {
      demand[j] = std::exp(16.0 + 1.5 * draw.normal());
      std::vector<Supplier>& s = suppliers[j];
      double rest = 1.0;
      const double jitter = draw.uniform(0.8, 1.2);
      if (contains(intermediaries, j)) {
        // intermediaries buy almost everything from the hub
        s.push_back({hub, 0.9});
        rest = 0.1;
      } else if (j != hub && !(dominant && !contains(eu, j))) {
        // the dominant exporter of the single-source resource serves the EU
        const double cap = contains(processors, j) ? 0.8 : 0.95;
        const double h = dominant ? 0.85 : std::min(cap, c * jitter);
        s.push_back({hub, h});
        rest -= h;
      }
      if (contains(eu, j)) {
        const double share = std::min(0.6 * e, rest - 0.04);
        if (share > 0.03) {
          auto picks = draw.pick(intermediaries, 2);
          const double split = draw.uniform(0.3, 0.7);
          s.push_back({picks[0], share * split});
          s.push_back({picks[1], share * (1.0 - split)});
          rest -= share;
        }
        if (rest > 0.12) {
          std::vector<std::string> others;
          for (const auto& m : eu) {
            if (m != j) others.push_back(m);
          }
          s.push_back({draw.pick(others, 1)[0], 0.1});
          rest -= 0.1;
        }
      } else if (contains(processors, j)) {
        // EU exports go to the processing countries
        auto members = draw.pick(eu, 2);
        s.push_back({members[0], 0.08});
        s.push_back({members[1], 0.07});
        rest -= 0.15;
      }
      // the hub and the intermediaries source from other low-stability producers
      std::vector<std::string> pool;
      const bool upstream = j == hub || contains(intermediaries, j);
      for (const auto& o : upstream ? low_stability : non_eu) {
        if (o != j && o != hub && !contains(intermediaries, o)) pool.push_back(o);
      }
      auto picks = draw.pick(pool, upstream ? 1 + draw.below(2) : 2 + draw.below(3));
      std::vector<double> w;
      double w_total = 0.0;
      for (std::size_t i = 0; i < picks.size(); ++i) {
        w.push_back(draw.uniform(0.5, 1.5));
        w_total += w.back();
      }
      for (std::size_t i = 0; i < picks.size(); ++i) s.push_back({picks[i], rest * w[i] / w_total});
      // sub-threshold noise from a country that is not yet a supplier
      std::vector<std::string> quiet;
      for (const auto& o : all) {
        bool used = o == j || std::any_of(s.begin(), s.end(),
                                          [&](const Supplier& x) { return x.exporter == o; });
        if (!used) quiet.push_back(o);
      }
      if (!quiet.empty()) s.push_back({draw.pick(quiet, 1)[0], 0.002});
    }

    double mass_total = 0.0;
    for (int t = start_year - options.first_year; t < years; ++t) {
      const int year = options.first_year + t;
      for (const std::string& j : all) {
        const double d = demand[j] * std::pow(1.03, t) * std::exp(0.1 * draw.normal());
        for (const Supplier& s : suppliers[j]) {
          const double value = std::round(d * s.share * std::exp(0.1 * draw.normal()));
          if (value <= 0.0) continue;
          const double price = contains(eu, s.exporter)
                                   ? price_eu[t]
                                   : price_world[t] * exporter_markup[s.exporter];
          const double mass = std::round(value / price * 1000.0) / 1000.0;
          if (mass <= 0.0) continue;
          mass_total += mass;

          RawTradeRecord exp_side{year, s.exporter, j, id, Direction::exports, value, mass, 0};
          RawTradeRecord imp_side{year, j, s.exporter, id, Direction::imports, value, mass, 0};
          const double u = draw.uniform();
          if (u < 0.15) {
            fx.records.push_back(exp_side);
          } else if (u < 0.3) {
            fx.records.push_back(imp_side);
          } else {
            // one side under-reports value and mass by the same factor
            RawTradeRecord& low = draw.chance(0.5) ? exp_side : imp_side;
            const double f = draw.uniform(0.7, 1.0);
            low.value_usd = std::floor(low.value_usd * f);
            low.mass_kg = std::floor(*low.mass_kg * f * 1000.0) / 1000.0;
            fx.records.push_back(exp_side);
            fx.records.push_back(imp_side);
          }
        }
      }
    }
    if (k % 11 != 4 && !dominant) {
      r.reserves_kg = std::round(mass_total * std::exp(-target_scarcity));
    }
    resources.push_back(std::move(r));
  }
  fx.resources = ResourceRegistry(std::move(resources));
  return fx;
}

void write_fixture(const std::filesystem::path& dir, const Fixture& fixture) {
  std::filesystem::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError((dir / name).string(), 0, "cannot write file");
    return out;
  };
  {
    auto out = open("countries.csv");
    write_countries(out, fixture.countries);
  }
  {
    auto out = open("resources.csv");
    write_resources(out, fixture.resources);
  }
  auto out = open("trade.csv");
  write_trade_records(out, fixture.records);
}

}  // namespace traderisk
