#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace srprior::csv {

/// Shortest form that still round-trips: 17 significant digits.
std::string format(double value);

std::vector<std::string> split(std::string_view line, char sep = ',');
std::string_view trim(std::string_view s);

double parse_double(std::string_view field);
long long parse_int(std::string_view field);

struct Document {
  std::map<std::string, std::string> meta;  // from "# key=value" lines
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Throws CsvError when the column is missing.
  std::size_t column(std::string_view name) const;
};

Document read(std::istream& in);

void write_meta(std::ostream& out, std::string_view key, std::string_view value);
void write_row(std::ostream& out, const std::vector<std::string>& fields);

}  // namespace srprior::csv
