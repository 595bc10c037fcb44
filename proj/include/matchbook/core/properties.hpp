#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace matchbook {

class PropertiesError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Java-style `KEY=VALUE` text. Lines starting with `#` or `!` are comments;
// keys and values are trimmed. Later duplicates overwrite earlier ones.
// A line ending in a backslash continues on the next line.
class Properties {
 public:
  static Properties parse(std::string_view text);
  static Properties load(const std::filesystem::path& path);

  std::optional<std::string> get(std::string_view key) const;
  std::string require(std::string_view key) const;
  double require_double(std::string_view key) const;
  std::vector<double> require_doubles(std::string_view key) const;
  bool contains(std::string_view key) const { return values_.count(std::string(key)) != 0; }
  void set(std::string key, std::string value) { values_[std::move(key)] = std::move(value); }
  const std::map<std::string, std::string, std::less<>>& entries() const { return values_; }

 private:
  std::map<std::string, std::string, std::less<>> values_;
};

std::string_view trim(std::string_view s);
std::vector<std::string> split_list(std::string_view s, char sep = ',');

}  // namespace matchbook
