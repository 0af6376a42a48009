#include "reveal/kv_text.hpp"

#include "reveal/types.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace reveal {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

KeyValueDocument KeyValueDocument::parse(std::istream& in) {
  KeyValueDocument doc;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto colon = body.find(':');
    if (colon == std::string_view::npos) {
      throw InvalidInput("line " + std::to_string(line_no) + ": expected 'key: value'");
    }
    const auto key = trim(body.substr(0, colon));
    if (key.empty()) {
      throw InvalidInput("line " + std::to_string(line_no) + ": empty key");
    }
    if (doc.contains(key)) {
      throw InvalidInput("line " + std::to_string(line_no) + ": duplicate key '" + std::string(key) + "'");
    }
    doc.set(std::string(key), std::string(trim(body.substr(colon + 1))));
  }
  return doc;
}

KeyValueDocument KeyValueDocument::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open '" + path + "'");
  try {
    return parse(in);
  } catch (const InvalidInput& e) {
    throw InvalidInput(path + ": " + e.what());
  }
}

bool KeyValueDocument::contains(std::string_view key) const {
  return values_.find(key) != values_.end();
}

const std::string& KeyValueDocument::get(std::string_view key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw InvalidInput("missing key '" + std::string(key) + "'");
  return it->second;
}

double KeyValueDocument::get_double(std::string_view key) const {
  return parse_double(get(key));
}

std::size_t KeyValueDocument::get_size(std::string_view key) const {
  const auto& text = get(key);
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw InvalidInput("key '" + std::string(key) + "': expected a non-negative integer, got '" + text + "'");
  }
  return value;
}

std::vector<double> KeyValueDocument::get_doubles(std::string_view key) const {
  return parse_doubles(get(key));
}

void KeyValueDocument::set(std::string key, std::string value) {
  auto [it, inserted] = values_.insert_or_assign(key, std::move(value));
  if (inserted) order_.push_back(std::move(key));
}

void KeyValueDocument::write(std::ostream& out) const {
  for (const auto& key : order_) out << key << ": " << values_.find(key)->second << '\n';
}

std::string format_double(double value, int significant_digits) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general,
                                       significant_digits);
  if (ec != std::errc()) throw NumericError("cannot format double");
  return std::string(buf, ptr);
}

double parse_double(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw InvalidInput("expected a number, got '" + std::string(text) + "'");
  }
  return value;
}

std::vector<double> parse_doubles(std::string_view text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto start = text.find_first_not_of(" \t\r\n", pos);
    if (start == std::string_view::npos) break;
    auto end = text.find_first_of(" \t\r\n", start);
    if (end == std::string_view::npos) end = text.size();
    out.push_back(parse_double(text.substr(start, end - start)));
    pos = end;
  }
  return out;
}

std::string join_doubles(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ' ';
    out += format_double(values[i]);
  }
  return out;
}

}  // namespace reveal
