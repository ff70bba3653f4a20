#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace risknet::csv {

/// One parsed record plus the 1-based line number it started on.
struct Row {
  std::size_t line = 0;
  std::vector<std::string> fields;
};

/// RFC 4180 reader: quoted fields may contain commas, doubled quotes and
/// newlines. Accepts LF or CRLF endings and strips a leading UTF-8 BOM.
/// Blank lines are skipped. Throws InputError on an unterminated quote.
std::vector<Row> parse(std::string_view text);

/// Quotes a field only when it contains a comma, quote or line break.
std::string escape(std::string_view field);

void write_row(std::ostream& out, const std::vector<std::string>& fields);

/// Shortest decimal representation that round-trips to the same double.
std::string format_double(double value);

/// Fixed-point formatting with the given number of decimals.
std::string format_fixed(double value, int decimals);

}  // namespace risknet::csv
