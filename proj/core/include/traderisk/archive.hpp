#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "traderisk/model.hpp"

namespace traderisk {

/// Panel archive: a single UTF-8 text file
///
///   # <header line, e.g. tool version and config hash>
///   # checksum fnv1a64:<16 hex digits of FNV-1a-64 over the body>
///   [years]
///   2000,2001,...
///   [countries]
///   <countries CSV>
///   [resources]
///   <resources CSV>
///   [flows]
///   resource,year,exporter,importer,value_usd,mass_kg
///   ...
///
/// The body is everything after the checksum line. Numbers use the shortest
/// representation that round-trips, so write/read is value-identical.
std::string panel_body(const TradeFlowPanel& panel);
std::string panel_checksum(const TradeFlowPanel& panel);

std::string serialize_panel(const TradeFlowPanel& panel, std::string_view header_line);

/// Throws InputError on malformed content or checksum mismatch.
TradeFlowPanel deserialize_panel(std::string_view text, const std::string& name);

void write_archive(const std::filesystem::path& path, const TradeFlowPanel& panel,
                   std::string_view header_line);
TradeFlowPanel read_archive(const std::filesystem::path& path);

}  // namespace traderisk
