#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "traderisk/ingest.hpp"
#include "traderisk/model.hpp"

namespace traderisk {

/// Synthetic trade data with a known structure:
///   - per resource a concentration c in [0.1, 0.9] sets the import share
///     supplied by one low-stability hub; scarcity rises with c;
///   - per resource an indirect exposure e sets the EU members' import share
///     from intermediaries (BR, ZA, KZ) that buy 90% from the hub and sell
///     only to the EU;
///   - the EU export price follows a log random walk whose step size grows
///     with IR_EU * (0.2 + e);
///   - BERYLLIUM: the hub supplies 85% of each EU member and serves no one
///     else but the intermediaries; IR_EU = 1; reserves unknown.
/// Mirror records disagree (one side lower or absent), every importer has
/// sub-1% noise flows, and some inputs are missing on purpose.
struct FixtureOptions {
  std::uint64_t seed = 20121231;
  std::size_t resources = 40;
  int first_year = 2000;
  int last_year = 2012;
};

struct Fixture {
  CountryRegistry countries;
  ResourceRegistry resources;
  std::vector<RawTradeRecord> records;
};

Fixture generate_fixture(const FixtureOptions& options = {});

/// trade.csv, countries.csv, resources.csv in `dir`.
void write_fixture(const std::filesystem::path& dir, const Fixture& fixture);

}  // namespace traderisk
