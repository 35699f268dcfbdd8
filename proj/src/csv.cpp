#include "rttforge/csv.hpp"

#include <istream>
#include <ostream>
#include <stdexcept>

namespace rttforge::csv {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

std::vector<Row> read(std::istream& in) {
  std::vector<Row> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    Row row;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      row.push_back(trim(line.substr(start, comma - start)));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_row(std::ostream& out, const Row& row) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out << ',';
    out << row[i];
  }
  out << '\n';
}

std::vector<Row> read_with_header(std::istream& in,
                                  const std::vector<std::string>& expected) {
  auto rows = read(in);
  if (rows.empty()) throw std::invalid_argument("csv: missing header");
  const Row& header = rows.front();
  if (header.size() < expected.size()) {
    throw std::invalid_argument("csv: header has too few columns");
  }
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (header[i] != expected[i]) {
      throw std::invalid_argument("csv: expected column '" + expected[i] +
                                  "', found '" + header[i] + "'");
    }
  }
  rows.erase(rows.begin());
  for (const Row& r : rows) {
    if (r.size() < expected.size()) {
      throw std::invalid_argument("csv: short row");
    }
  }
  return rows;
}

}  // namespace rttforge::csv
