#include "rtms/keyvalue.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace rtms {

namespace {

std::string trim(const std::string& s) {
  std::size_t begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) {
    return "";
  }
  std::size_t end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

KeyValueFile KeyValueFile::parse(const std::string& text, const std::string& origin) {
  KeyValueFile out;
  out.origin_ = origin;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) {
      line.erase(hash);
    }
    std::string trimmed = trim(line);
    if (trimmed.empty()) {
      continue;
    }
    std::size_t eq = trimmed.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(line_no) +
                        ": expected `key = value`, got \"" + trimmed + "\"");
    }
    Entry e;
    e.key = trim(trimmed.substr(0, eq));
    e.value = trim(trimmed.substr(eq + 1));
    e.line = line_no;
    if (e.key.empty()) {
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty key");
    }
    out.entries_.push_back(std::move(e));
  }
  return out;
}

KeyValueFile KeyValueFile::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str(), path.string());
}

bool KeyValueFile::has(const std::string& key) const {
  return get(key).has_value();
}

std::optional<std::string> KeyValueFile::get(const std::string& key) const {
  std::optional<std::string> found;
  for (const auto& e : entries_) {
    if (e.key == key) {
      found = e.value;
    }
  }
  return found;
}

std::vector<std::string> KeyValueFile::get_all(const std::string& key) const {
  std::vector<std::string> out;
  for (const auto& e : entries_) {
    if (e.key == key) {
      out.push_back(e.value);
    }
  }
  return out;
}

std::string KeyValueFile::get_or(const std::string& key, const std::string& fallback) const {
  auto v = get(key);
  return v ? *v : fallback;
}

double KeyValueFile::get_double(const std::string& key, double fallback) const {
  auto v = get(key);
  if (!v) {
    return fallback;
  }
  try {
    return std::stod(*v);
  } catch (const std::exception&) {
    throw ConfigError(origin_ + ": key \"" + key + "\" is not a number: \"" + *v + "\"");
  }
}

uint64_t KeyValueFile::get_u64(const std::string& key, uint64_t fallback) const {
  auto v = get(key);
  if (!v) {
    return fallback;
  }
  uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
  if (ec != std::errc() || ptr != v->data() + v->size()) {
    throw ConfigError(origin_ + ": key \"" + key + "\" is not an unsigned integer: \"" +
                      *v + "\"");
  }
  return out;
}

std::vector<double> KeyValueFile::get_doubles(const std::string& key,
                                              std::size_t expected) const {
  auto v = get(key);
  if (!v) {
    throw ConfigError(origin_ + ": missing required key \"" + key + "\"");
  }
  return parse_doubles(*v, expected, origin_ + ": key \"" + key + "\"");
}

std::vector<double> KeyValueFile::parse_doubles(const std::string& value,
                                                std::size_t expected,
                                                const std::string& context) {
  std::istringstream in(value);
  std::vector<double> out;
  double d;
  while (in >> d) {
    out.push_back(d);
  }
  if (out.size() != expected) {
    throw ConfigError(context + ": expected " + std::to_string(expected) +
                      " numbers, got \"" + value + "\"");
  }
  return out;
}

}  // namespace rtms
