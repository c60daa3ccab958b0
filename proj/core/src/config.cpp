#include "traderisk/config.hpp"

#include <fstream>
#include <sstream>

#include "traderisk/csv.hpp"
#include "traderisk/error.hpp"

namespace traderisk {

std::vector<std::string> split_list(std::string_view text, char separator) {
  std::vector<std::string> out;
  while (true) {
    auto pos = text.find(separator);
    auto item = normalize_id(text.substr(0, pos));
    if (!item.empty()) out.push_back(std::move(item));
    if (pos == std::string_view::npos) break;
    text.remove_prefix(pos + 1);
  }
  return out;
}

Config Config::defaults() {
  Config c;
  c.region_members["EU"] = {"AT", "BE", "BG", "CY", "CZ", "DE", "DK", "EE", "ES",
                            "FI", "FR", "GB", "GR", "HU", "IE", "IT", "LT", "LU",
                            "LV", "MT", "NL", "PL", "PT", "RO", "SE", "SI", "SK"};
  return c;
}

namespace {

std::string trim(std::string_view s) {
  auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

double to_double(std::string_view key, std::string_view value) {
  auto v = csv::parse_double(value);
  if (!v) throw InputError("config: invalid number for " + std::string(key) + ": '" + std::string(value) + "'");
  return *v;
}

std::size_t to_count(std::string_view key, std::string_view value) {
  auto v = csv::parse_int(value);
  if (!v || *v < 0) throw InputError("config: invalid count for " + std::string(key) + ": '" + std::string(value) + "'");
  return static_cast<std::size_t>(*v);
}

}  // namespace

void Config::set(std::string_view key_raw, std::string_view value_raw) {
  const std::string key = trim(key_raw);
  const std::string value = trim(value_raw);
  if (key == "threshold") {
    threshold = to_double(key, value);
    if (!(threshold >= 0.0 && threshold < 1.0)) throw InputError("config: threshold must lie in [0,1)");
  } else if (key == "alpha_factor") {
    alpha_factor = to_double(key, value);
    if (!(alpha_factor > 0.0 && alpha_factor < 1.0)) throw InputError("config: alpha_factor must lie in (0,1)");
  } else if (key == "years") {
    auto range = YearRange::parse(value);
    if (!range) throw InputError("config: years must be FIRST:LAST");
    years = *range;
  } else if (key == "realizations") {
    realizations = to_count(key, value);
    if (realizations == 0) throw InputError("config: realizations must be >= 1");
  } else if (key == "tol") {
    tol = to_double(key, value);
    if (!(tol > 0.0)) throw InputError("config: tol must be > 0");
  } else if (key == "max_iter") {
    max_iter = to_count(key, value);
  } else if (key == "regions") {
    regions = split_list(value, ',');
  } else if (key == "stability") {
    auto mode = parse_stability_mode(value);
    if (!mode) throw InputError("config: stability must be ps, rgi or none");
    stability = *mode;
  } else if (key == "pagerank_scale") {
    auto scale = parse_pagerank_scale(value);
    if (!scale) throw InputError("config: pagerank_scale must be unit-sum or raw");
    pagerank_scale = *scale;
  } else if (key == "pagerank_flow") {
    auto flow = graph::parse_pagerank_flow(value);
    if (!flow) throw InputError("config: pagerank_flow must be downstream or upstream");
    pagerank_flow = *flow;
  } else if (key == "seed") {
    auto v = csv::parse_int(value);
    if (!v || *v < 0) throw InputError("config: invalid seed '" + value + "'");
    seed = static_cast<std::uint64_t>(*v);
  } else if (key == "jobs") {
    jobs = std::max<std::size_t>(1, to_count(key, value));
  } else if (key.starts_with("region.") && key.size() > 7) {
    auto members = split_list(value, ';');
    region_members[normalize_id(key.substr(7))] = {members.begin(), members.end()};
  } else {
    throw InputError("config: unknown key '" + key + "'");
  }
}

std::string Config::canonical() const {
  std::ostringstream out;
  out << "alpha_factor=" << csv::format_double(alpha_factor) << '\n';
  out << "max_iter=" << max_iter << '\n';
  out << "pagerank_flow=" << graph::to_string(pagerank_flow) << '\n';
  out << "pagerank_scale=" << to_string(pagerank_scale) << '\n';
  out << "realizations=" << realizations << '\n';
  for (const auto& [name, members] : region_members) {
    out << "region." << name << '=';
    bool first = true;
    for (const auto& m : members) {
      out << (first ? "" : ";") << m;
      first = false;
    }
    out << '\n';
  }
  out << "regions=";
  for (std::size_t i = 0; i < regions.size(); ++i) out << (i ? "," : "") << regions[i];
  out << '\n';
  out << "seed=" << seed << '\n';
  out << "stability=" << to_string(stability) << '\n';
  out << "threshold=" << csv::format_double(threshold) << '\n';
  out << "tol=" << csv::format_double(tol) << '\n';
  out << "years=" << years.first << ':' << years.last << '\n';
  return out.str();
}

std::string Config::hash() const { return csv::hex64(csv::fnv1a64(canonical())); }

IndicatorOptions Config::indicator_options() const {
  IndicatorOptions options;
  options.stability = stability;
  options.pagerank_scale = pagerank_scale;
  options.pagerank.alpha_factor = alpha_factor;
  options.pagerank.flow = pagerank_flow;
  options.pagerank.tol = tol;
  options.pagerank.max_iter = max_iter;
  return options;
}

Config load_config(const std::filesystem::path& path, Config base) {
  std::ifstream in(path);
  if (!in) throw InputError(path.string(), 0, "cannot open config file");
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw InputError(path.string(), line_no, "expected key = value");
    try {
      base.set(std::string_view(line).substr(0, eq), std::string_view(line).substr(eq + 1));
    } catch (const InputError& e) {
      throw InputError(path.string(), line_no, e.what());
    }
  }
  return base;
}

}  // namespace traderisk
