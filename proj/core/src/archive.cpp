#include "traderisk/archive.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "traderisk/csv.hpp"
#include "traderisk/error.hpp"
#include "traderisk/ingest.hpp"

namespace traderisk {

namespace {

constexpr std::string_view kChecksumPrefix = "# checksum fnv1a64:";

}  // namespace

std::string panel_body(const TradeFlowPanel& panel) {
  std::ostringstream out;
  out << "[years]\n";
  for (std::size_t i = 0; i < panel.years.size(); ++i) {
    out << (i ? "," : "") << panel.years[i];
  }
  out << "\n[countries]\n";
  write_countries(out, panel.countries);
  out << "[resources]\n";
  write_resources(out, panel.resources);
  out << "[flows]\nresource,year,exporter,importer,value_usd,mass_kg\n";
  for (const auto& [key, layer] : panel.value_usd) {
    const Layer* mass = panel.mass_layer(key.resource, key.year);
    for (const Edge& e : layer.edges()) {
      std::optional<double> m;
      if (mass) {
        const double w = mass->weight(e.source, e.target);
        if (w != 0.0) m = w;
      }
      out << csv::join({key.resource, std::to_string(key.year), panel.countries[e.source].id,
                        panel.countries[e.target].id, csv::format_double(e.weight),
                        csv::format_optional(m)})
          << '\n';
    }
  }
  return out.str();
}

std::string panel_checksum(const TradeFlowPanel& panel) {
  return csv::hex64(csv::fnv1a64(panel_body(panel)));
}

std::string serialize_panel(const TradeFlowPanel& panel, std::string_view header_line) {
  const std::string body = panel_body(panel);
  std::string out = "# ";
  out += header_line;
  out += '\n';
  out += kChecksumPrefix;
  out += csv::hex64(csv::fnv1a64(body));
  out += '\n';
  out += body;
  return out;
}

TradeFlowPanel deserialize_panel(std::string_view text, const std::string& name) {
  auto first_nl = text.find('\n');
  if (first_nl == std::string_view::npos) throw InputError(name, 1, "truncated archive");
  auto second_nl = text.find('\n', first_nl + 1);
  if (second_nl == std::string_view::npos) throw InputError(name, 2, "truncated archive");
  const std::string_view checksum_line = text.substr(first_nl + 1, second_nl - first_nl - 1);
  if (!checksum_line.starts_with(kChecksumPrefix)) {
    throw InputError(name, 2, "missing checksum line");
  }
  const std::string_view body = text.substr(second_nl + 1);
  const std::string expected(checksum_line.substr(kChecksumPrefix.size()));
  if (csv::hex64(csv::fnv1a64(body)) != expected) {
    throw InputError(name, 2, "checksum mismatch");
  }

  // Split the body into sections, remembering where each starts.
  std::map<std::string, std::pair<std::string, std::size_t>> sections;
  std::string current;
  std::size_t line_no = 2;
  std::size_t pos = 0;
  while (pos < body.size()) {
    auto nl = body.find('\n', pos);
    if (nl == std::string_view::npos) nl = body.size();
    const std::string_view line = body.substr(pos, nl - pos);
    ++line_no;
    if (line.size() > 2 && line.front() == '[' && line.back() == ']') {
      current = std::string(line.substr(1, line.size() - 2));
      if (sections.contains(current)) throw InputError(name, line_no, "duplicate section");
      sections[current] = {std::string(), line_no};
    } else if (current.empty()) {
      throw InputError(name, line_no, "content outside a section");
    } else {
      sections[current].first.append(line).push_back('\n');
    }
    pos = nl + 1;
  }
  for (const char* required : {"years", "countries", "resources", "flows"}) {
    if (!sections.contains(required)) {
      throw InputError(name, 0, std::string("missing section [") + required + "]");
    }
  }

  TradeFlowPanel panel;
  {
    const auto& [content, start] = sections["years"];
    std::string_view years = content;
    while (!years.empty() && (years.back() == '\n')) years.remove_suffix(1);
    if (!years.empty()) {
      for (const auto& field : csv::split_line(years)) {
        auto y = csv::parse_int(field);
        if (!y) throw InputError(name, start + 1, "invalid year '" + field + "'");
        panel.years.push_back(static_cast<int>(*y));
      }
    }
  }
  {
    std::istringstream in(sections["countries"].first);
    panel.countries = read_countries(in, name + "[countries]");
  }
  {
    std::istringstream in(sections["resources"].first);
    panel.resources = read_resources(in, name + "[resources]");
  }

  const std::size_t n = panel.countries.size();
  std::map<LayerKey, std::vector<Edge>> values, masses;
  {
    const auto& [content, start] = sections["flows"];
    std::istringstream in(content);
    csv::Reader reader(in, name + "[flows]");
    std::vector<std::string> f;
    if (!reader.next(f) ||
        f != std::vector<std::string>{"resource", "year", "exporter", "importer", "value_usd",
                                      "mass_kg"}) {
      reader.fail("bad flows header");
    }
    while (reader.next(f)) {
      if (f.size() != 6) reader.fail("expected 6 fields");
      auto year = csv::parse_int(f[1]);
      auto exporter = panel.countries.index_of(f[2]);
      auto importer = panel.countries.index_of(f[3]);
      auto value = csv::parse_double(f[4]);
      if (!year || !exporter || !importer || !value || !panel.resources.contains(f[0])) {
        reader.fail("invalid flow row");
      }
      LayerKey key{f[0], static_cast<int>(*year)};
      values[key].push_back({*exporter, *importer, *value});
      if (!f[5].empty()) {
        auto mass = csv::parse_double(f[5]);
        if (!mass) reader.fail("invalid mass");
        masses[key].push_back({*exporter, *importer, *mass});
      }
    }
  }
  try {
    for (auto& [key, edges] : values) panel.value_usd.emplace(key, Layer(n, std::move(edges)));
    for (auto& [key, edges] : masses) panel.mass_kg.emplace(key, Layer(n, std::move(edges)));
  } catch (const std::invalid_argument& e) {
    throw InputError(name, 0, e.what());
  }
  return panel;
}

void write_archive(const std::filesystem::path& path, const TradeFlowPanel& panel,
                   std::string_view header_line) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError(path.string(), 0, "cannot write file");
  out << serialize_panel(panel, header_line);
  if (!out) throw InputError(path.string(), 0, "write failed");
}

TradeFlowPanel read_archive(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path.string(), 0, "cannot open file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return deserialize_panel(buffer.str(), path.string());
}

}  // namespace traderisk
