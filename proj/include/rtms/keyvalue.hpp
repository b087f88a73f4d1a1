#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rtms {

// Plain-text configuration: one `key = value` pair per line, `#` starts
// a comment, keys may repeat (order preserved). Used by scenario files,
// scene configuration, and workflow scripts.
class KeyValueFile {
 public:
  static KeyValueFile parse(const std::string& text, const std::string& origin = "");
  static KeyValueFile load(const std::filesystem::path& path);

  struct Entry {
    std::string key;
    std::string value;
    int line = 0;
  };

  const std::vector<Entry>& entries() const { return entries_; }
  bool has(const std::string& key) const;

  std::optional<std::string> get(const std::string& key) const;  // last wins
  std::vector<std::string> get_all(const std::string& key) const;

  std::string get_or(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  uint64_t get_u64(const std::string& key, uint64_t fallback) const;

  // Whitespace-separated doubles; throws on count mismatch.
  std::vector<double> get_doubles(const std::string& key, std::size_t expected) const;
  static std::vector<double> parse_doubles(const std::string& value, std::size_t expected,
                                           const std::string& context);

  const std::string& origin() const { return origin_; }

 private:
  std::vector<Entry> entries_;
  std::string origin_;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rtms
