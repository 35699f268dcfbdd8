#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rttforge::csv {

using Row = std::vector<std::string>;

// Minimal comma-separated reader for the tool's own formats: no quoting, no
// embedded commas. Blank lines are skipped and surrounding whitespace and a
// trailing '\r' are trimmed from each field.
std::vector<Row> read(std::istream& in);

void write_row(std::ostream& out, const Row& row);

// Reads rows and checks that the first one starts with the given columns.
// Returns the data rows only. Throws std::invalid_argument on a mismatch.
std::vector<Row> read_with_header(std::istream& in,
                                  const std::vector<std::string>& expected);

}  // namespace rttforge::csv
