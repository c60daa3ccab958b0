#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace traderisk::csv {

/// Splits one CSV line. Double-quoted fields may contain commas and "" escapes.
std::vector<std::string> split_line(std::string_view line);

/// Streaming reader that tracks 1-based line numbers and skips blank lines
/// and lines starting with '#'.
class Reader {
 public:
  Reader(std::istream& in, std::string file_name);

  /// False at end of input.
  bool next(std::vector<std::string>& fields);
  std::size_t line() const noexcept { return line_; }
  const std::string& file_name() const noexcept { return file_name_; }

  /// Throws InputError tagged with the current line.
  [[noreturn]] void fail(const std::string& message) const;

 private:
  std::istream& in_;
  std::string file_name_;
  std::size_t line_ = 0;
  std::string buffer_;
};

std::optional<double> parse_double(std::string_view text);
std::optional<long long> parse_int(std::string_view text);

/// Shortest representation that round-trips exactly.
std::string format_double(double value);
std::string format_optional(const std::optional<double>& value);

/// Quotes a field when it contains a comma, quote or newline.
std::string escape(std::string_view field);

std::string join(const std::vector<std::string>& fields);

/// FNV-1a, 64 bit.
std::uint64_t fnv1a64(std::string_view data,
                      std::uint64_t seed = 14695981039346656037ULL);
std::string hex64(std::uint64_t value);

}  // namespace traderisk::csv
