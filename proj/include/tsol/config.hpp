#pragma once

#include <cerrno>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "tsol/errors.hpp"

namespace tsol {

// Malformed experiment configuration. line() is 1-based, 0 when the problem
// is not tied to a single line.
class ConfigError : public InvalidInput {
 public:
  ConfigError(int line, const std::string& what)
      : InvalidInput(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Flat `key = value` text. '#' starts a comment; keys are dotted paths.
class RawConfig {
 public:
  struct Entry {
    std::string value;
    int line = 0;
  };

  static RawConfig parse(const std::string& text, const std::set<std::string>& known_keys = {}) {
    RawConfig cfg;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
      ++line;
      if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
      const std::string body = trim(raw);
      if (body.empty()) continue;
      const auto eq = body.find('=');
      if (eq == std::string::npos) throw ConfigError(line, "expected key = value");
      const std::string key = trim(body.substr(0, eq));
      const std::string value = trim(body.substr(eq + 1));
      if (key.empty()) throw ConfigError(line, "empty key");
      if (!known_keys.empty() && !known_keys.count(key)) throw ConfigError(line, "unknown key '" + key + "'");
      if (cfg.entries_.count(key)) throw ConfigError(line, "duplicate key '" + key + "'");
      cfg.entries_[key] = {value, line};
    }
    return cfg;
  }

  static RawConfig load(const std::string& path, const std::set<std::string>& known_keys = {}) {
    std::ifstream in(path);
    if (!in) throw ConfigError(0, "cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), known_keys);
  }

  bool has(const std::string& key) const { return entries_.count(key) > 0; }
  int line_of(const std::string& key) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? 0 : it->second.line;
  }

  std::string get_string(const std::string& key, const std::string& fallback) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? fallback : it->second.value;
  }

  std::string require_string(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) throw ConfigError(0, "missing required key '" + key + "'");
    return it->second.value;
  }

  double get_double(const std::string& key, double fallback) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? fallback : to_double(it->second);
  }

  std::int64_t get_int(const std::string& key, std::int64_t fallback) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? fallback : to_int(it->second);
  }

  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    const std::string& s = it->second.value;
    if (s.empty() || s[0] == '-') throw ConfigError(it->second.line, "'" + key + "' must be a nonnegative integer");
    char* end = nullptr;
    errno = 0;
    const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
    if (errno || end != s.c_str() + s.size()) throw ConfigError(it->second.line, "'" + key + "' must be an integer");
    return v;
  }

  bool get_bool(const std::string& key, bool fallback) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    const std::string& s = it->second.value;
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw ConfigError(it->second.line, "'" + key + "' must be true or false");
  }

  void set(const std::string& key, const std::string& value) {
    auto& e = entries_[key];
    e.value = value;
  }

  const std::map<std::string, Entry>& entries() const { return entries_; }

  static std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
  }

  static double parse_double(const std::string& s, int line, const std::string& what) {
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || errno || end != s.c_str() + s.size()) throw ConfigError(line, what + ": not a number: '" + s + "'");
    return v;
  }

 private:
  static double to_double(const Entry& e) { return parse_double(e.value, e.line, "value"); }

  static std::int64_t to_int(const Entry& e) {
    char* end = nullptr;
    errno = 0;
    const long long v = std::strtoll(e.value.c_str(), &end, 10);
    if (e.value.empty() || errno || end != e.value.c_str() + e.value.size())
      throw ConfigError(e.line, "not an integer: '" + e.value + "'");
    return v;
  }

  std::map<std::string, Entry> entries_;
};

}  // namespace tsol
