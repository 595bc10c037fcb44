#include "matchbook/core/properties.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace matchbook {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string> split_list(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto pos = s.find(sep, start);
    const auto item = trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (!item.empty()) out.emplace_back(item);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

Properties Properties::parse(std::string_view text) {
  Properties p;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string joined(trim(text.substr(start, end - start)));
    start = end + 1;
    ++line_no;
    if (joined.empty() || joined.front() == '#' || joined.front() == '!') continue;
    // A trailing backslash continues the value on the next line.
    while (!joined.empty() && joined.back() == '\\' && start < text.size()) {
      joined.pop_back();
      end = text.find('\n', start);
      if (end == std::string_view::npos) end = text.size();
      joined += trim(text.substr(start, end - start));
      start = end + 1;
      ++line_no;
    }
    const std::string_view line = joined;
    const auto eq = line.find_first_of("=:");
    if (eq == std::string_view::npos) {
      throw PropertiesError("line " + std::to_string(line_no) + ": expected KEY=VALUE");
    }
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) throw PropertiesError("line " + std::to_string(line_no) + ": empty key");
    p.values_[std::string(key)] = std::string(trim(line.substr(eq + 1)));
  }
  return p;
}

Properties Properties::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw PropertiesError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::optional<std::string> Properties::get(std::string_view key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::string Properties::require(std::string_view key) const {
  auto v = get(key);
  if (!v) throw PropertiesError("missing key " + std::string(key));
  return *v;
}

double Properties::require_double(std::string_view key) const {
  const auto s = require(key);
  try {
    std::size_t used = 0;
    const double d = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return d;
  } catch (const std::exception&) {
    throw PropertiesError("key " + std::string(key) + ": not a number: " + s);
  }
}

std::vector<double> Properties::require_doubles(std::string_view key) const {
  std::vector<double> out;
  for (const auto& item : split_list(require(key))) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw PropertiesError("key " + std::string(key) + ": not a number: " + item);
    }
  }
  return out;
}

}  // namespace matchbook
