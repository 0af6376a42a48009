#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace reveal {

// Minimal RFC-4180-ish table I/O for the harness outputs. Fields never
// contain commas or quotes, so no quoting is produced or accepted.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(std::string_view name) const;  // throws InvalidInput if absent
};

// 17 significant digits, locale independent.
std::string csv_number(double value);
std::string csv_line(const std::vector<std::string>& fields);

CsvTable parse_csv(std::istream& in);
CsvTable read_csv(const std::string& path);

// Writes the whole content or throws InvalidInput naming the path.
void write_text_file(const std::string& path, const std::string& content);

}  // namespace reveal
