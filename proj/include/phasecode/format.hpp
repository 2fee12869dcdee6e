#pragma once

#include <ostream>
#include <span>
#include <string>
#include <string_view>

namespace phasecode {

// Shortest decimal representation that parses back to the same double.
std::string format_double(double value);

// Strict parse of a full string; throws ValidationError naming `what`.
double parse_double(std::string_view text, std::string_view what);
long long parse_integer(std::string_view text, std::string_view what);

// Minimal CSV writer: header row once, then rows of doubles or strings.
class CsvWriter {
public:
  explicit CsvWriter(std::ostream &out) : out_(out) {}

  void header(std::span<const std::string_view> columns);
  void row(std::span<const double> values);

  // Mixed rows: each cell is already formatted.
  void raw_row(std::span<const std::string> cells);

private:
  std::ostream &out_;
};

} // namespace phasecode
