#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace openkrotov::csv {

/// Fixed 15-significant-digit rendering used by every data file.
std::string format_number(double x);

void write_row(std::ostream& out, const std::vector<std::string>& cells);
void write_row(std::ostream& out, const std::vector<double>& values);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;
};

/// Plain comma-separated reader (no quoting).
Table read(std::istream& in);

double parse_number(const std::string& cell);

}  // namespace openkrotov::csv
