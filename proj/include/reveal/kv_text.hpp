#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace reveal {

// Flat "key: value" text documents, shared by instance files and harness
// config files. Blank lines and lines starting with '#' are ignored. Values
// are kept verbatim (trimmed); numeric arrays are whitespace separated.
class KeyValueDocument {
 public:
  static KeyValueDocument parse(std::istream& in);
  static KeyValueDocument load(const std::string& path);

  bool contains(std::string_view key) const;
  const std::string& get(std::string_view key) const;
  const std::vector<std::string>& keys() const { return order_; }

  double get_double(std::string_view key) const;
  std::size_t get_size(std::string_view key) const;
  std::vector<double> get_doubles(std::string_view key) const;

  void set(std::string key, std::string value);
  void write(std::ostream& out) const;

 private:
  std::map<std::string, std::string, std::less<>> values_;
  std::vector<std::string> order_;
};

// Shortest-safe decimal rendering with 17 significant digits; locale independent.
std::string format_double(double value, int significant_digits = 17);
double parse_double(std::string_view text);
std::vector<double> parse_doubles(std::string_view text);
std::string join_doubles(const std::vector<double>& values);

}  // namespace reveal
