#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "support/builders.hpp"
#include "traderisk/archive.hpp"
#include "traderisk/config.hpp"
#include "traderisk/csv.hpp"
#include "traderisk/error.hpp"
#include "traderisk/fixture.hpp"
#include "traderisk/ingest.hpp"
#include "traderisk/pipeline.hpp"
#include "traderisk/tables.hpp"

namespace {

using namespace traderisk;
namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "traderisk_io_test";
  fs::create_directories(dir);
  return dir / name;
}

TEST(Csv, SplitsQuotedFields) {
  EXPECT_EQ(csv::split_line("a,b,,c"), (std::vector<std::string>{"a", "b", "", "c"}));
  EXPECT_EQ(csv::split_line(R"("x,y","say ""hi""",z)"),
            (std::vector<std::string>{"x,y", R"(say "hi")", "z"}));
  EXPECT_EQ(csv::escape("a,b"), "\"a,b\"");
  EXPECT_EQ(csv::escape("plain"), "plain");
}

TEST(Csv, ReaderSkipsCommentsAndTracksLines) {
  std::istringstream in("# header\nx,y\n\n1,2\n");
  csv::Reader reader(in, "f.csv");
  std::vector<std::string> fields;
  ASSERT_TRUE(reader.next(fields));
  EXPECT_EQ(reader.line(), 2u);
  ASSERT_TRUE(reader.next(fields));
  EXPECT_EQ(reader.line(), 4u);
  EXPECT_EQ(fields[1], "2");
  EXPECT_FALSE(reader.next(fields));
}

TEST(Csv, NumbersRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 123456789.125, -2.5e17}) {
    EXPECT_EQ(*csv::parse_double(csv::format_double(v)), v);
  }
  EXPECT_FALSE(csv::parse_double("1.5x"));
  EXPECT_FALSE(csv::parse_double(""));
  EXPECT_FALSE(csv::parse_double("nan"));
  EXPECT_EQ(csv::parse_int("2012"), 2012);
  EXPECT_FALSE(csv::parse_int("20.5"));
  EXPECT_EQ(csv::format_optional(std::nullopt), "");
}

TEST(Csv, Fnv1aReferenceValues) {
  EXPECT_EQ(csv::fnv1a64(""), 14695981039346656037ull);
  EXPECT_EQ(csv::hex64(csv::fnv1a64("a")), "af63dc4c8601ec8c");
}

TradeFlowPanel small_fixture_panel() {
  Fixture fx = generate_fixture({.seed = 4, .resources = 3});
  return reconcile(fx.records, fx.countries, fx.resources);
}

TEST(Archive, RoundTripIsValueIdentical) {
  const auto p = small_fixture_panel();
  const std::string text = serialize_panel(p, "test");
  EXPECT_EQ(deserialize_panel(text, "mem"), p);
  const fs::path file = scratch("round.trp");
  write_archive(file, p, "test");
  EXPECT_EQ(read_archive(file), p);
  EXPECT_EQ(panel_checksum(read_archive(file)), panel_checksum(p));
}

TEST(Archive, DetectsTampering) {
  std::string text = serialize_panel(small_fixture_panel(), "test");
  const auto pos = text.rfind(',');
  text[pos - 1] = text[pos - 1] == '1' ? '2' : '1';
  try {
    deserialize_panel(text, "mem");
    FAIL() << "expected InputError";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("checksum"), std::string::npos);
  }
}

TEST(Archive, RejectsTruncatedAndMissingFiles) {
  EXPECT_THROW(deserialize_panel("# only one line", "mem"), InputError);
  EXPECT_THROW(read_archive(scratch("does_not_exist.trp")), InputError);
}

TEST(Archive, ChecksumIgnoresHeaderLine) {
  const auto p = small_fixture_panel();
  EXPECT_EQ(deserialize_panel(serialize_panel(p, "one"), "a"),
            deserialize_panel(serialize_panel(p, "two"), "b"));
}

class ConfigEnv : public ::testing::Test {
 protected:
  void TearDown() override { unsetenv(kConfigEnvVar); }
};

TEST_F(ConfigEnv, DefaultsAndSet) {
  Config c = Config::defaults();
  EXPECT_EQ(c.threshold, 0.01);
  EXPECT_EQ(c.alpha_factor, 0.85);
  EXPECT_EQ(c.region_members.at("EU").size(), 27u);
  c.set("regions", "eu,us,cn");
  EXPECT_EQ(c.regions, (std::vector<std::string>{"EU", "US", "CN"}));
  c.set("stability", "rgi");
  EXPECT_EQ(c.stability, StabilityMode::rgi);
  c.set("region.NAFTA", "US;CA;MX");
  EXPECT_EQ(c.region_members.at("NAFTA").size(), 3u);
}

TEST_F(ConfigEnv, InvalidValuesThrow) {
  Config c = Config::defaults();
  EXPECT_THROW(c.set("colour", "red"), InputError);
  EXPECT_THROW(c.set("threshold", "1.5"), InputError);
  EXPECT_THROW(c.set("alpha_factor", "abc"), InputError);
  EXPECT_THROW(c.set("years", "2012:2000"), InputError);
  EXPECT_THROW(c.set("realizations", "0"), InputError);
  EXPECT_THROW(c.set("stability", "wgi"), InputError);
  EXPECT_THROW(c.set("pagerank_flow", "sideways"), InputError);
}

TEST_F(ConfigEnv, FileOverridesDefaultsWithLineNumbers) {
  const fs::path file = scratch("a.conf");
  {
    std::ofstream out(file);
    out << "# comment\nthreshold = 0.05\n\nrealizations=7\n";
  }
  Config c = load_config(file);
  EXPECT_EQ(c.threshold, 0.05);
  EXPECT_EQ(c.realizations, 7u);
  EXPECT_EQ(c.alpha_factor, 0.85);

  const fs::path bad = scratch("bad.conf");
  {
    std::ofstream out(bad);
    out << "threshold = 0.05\nmystery = 1\n";
  }
  try {
    load_config(bad);
    FAIL() << "expected InputError";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("bad.conf:2"), std::string::npos) << e.what();
  }
  EXPECT_THROW(load_config(scratch("missing.conf")), InputError);
}

TEST_F(ConfigEnv, HashTracksOutputAffectingSettings) {
  Config a = Config::defaults();
  Config b = a;
  b.jobs = 8;
  EXPECT_EQ(a.hash(), b.hash());
  b.set("alpha_factor", "0.5");
  EXPECT_NE(a.hash(), b.hash());
  EXPECT_EQ(a.hash().size(), 16u);
}

TEST_F(ConfigEnv, ShippedConfigEqualsDefaults) {
  const fs::path file = testing_support::fixture_dir() / ".." / ".." / "config" / "traderisk.conf";
  EXPECT_EQ(load_config(file).canonical(), Config::defaults().canonical());
}

TEST(IndicatorJson, RoundTrip) {
  auto table = compute_indicators(small_fixture_panel(), [] {
    Config c = Config::defaults();
    c.regions = {"DE", "US"};
    return c;
  }());
  const std::string json = indicator_table_json(table, "abc");
  const IndicatorTable back = parse_indicator_table_json(json, "mem");
  EXPECT_EQ(back.regions, table.regions);
  EXPECT_EQ(back.global, table.global);
  EXPECT_EQ(back.regional, table.regional);
  EXPECT_THROW(parse_indicator_table_json("{not json", "mem"), InputError);
}

TEST(Tables, HeaderCarriesVersionAndHash) {
  const std::string header = output_header("0123456789abcdef");
  EXPECT_EQ(header.rfind("# traderisk ", 0), 0u);
  EXPECT_NE(header.find("config=0123456789abcdef"), std::string::npos);
}

TEST(Tables, GlobalCsvHasOneRowPerResource) {
  auto table = compute_indicators(small_fixture_panel(), [] {
    Config c = Config::defaults();
    c.regions = {"DE"};
    return c;
  }());
  std::ostringstream out;
  write_global_csv(out, table, "# h");
  std::istringstream in(out.str());
  std::string line;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '#') ++rows;
  }
  EXPECT_EQ(rows, table.global.size() + 1);
}

}  // namespace
