// Copyright 2026 The actfs Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ACTFS_CONFIG_HPP_
#define ACTFS_CONFIG_HPP_

// Flat key = value configuration files, a TOML subset:
//
//   # comment
//   scenarios = "fixed"
//   budgets   = [50, 100, 300, 500]
//   delta     = 0.05
//
// Values are numbers, double-quoted strings or one-line arrays of those.
// A key may repeat; every occurrence is kept in order.

#include <cmath>
#include <cstddef>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "actfs/dataset.hpp"

namespace actfs {

class Config {
 public:
  static Config parse(std::istream& in) {
    Config cfg;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const std::string body = strip(strip_comment(line));
      if (body.empty()) continue;
      const auto eq = body.find('=');
      if (eq == std::string::npos) throw DataError(where(lineno) + "expected 'key = value'");
      const std::string key = strip(body.substr(0, eq));
      const std::string raw = strip(body.substr(eq + 1));
      if (key.empty() || raw.empty()) throw DataError(where(lineno) + "empty key or value");
      cfg.entries_[key].push_back(parse_value(raw, lineno));
    }
    return cfg;
  }

  static Config load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("config: cannot open '" + path + "'");
    return parse(in);
  }

  bool has(const std::string& key) const { return entries_.count(key) != 0; }

  /// Throws on any key outside `allowed`.
  void restrict_to(const std::set<std::string>& allowed) const {
    for (const auto& [k, v] : entries_)
      if (!allowed.count(k)) throw DataError("config: unknown key '" + k + "'");
  }

  std::string string(const std::string& key, const std::string& fallback) const {
    const auto* v = last(key);
    return v ? scalar(key, *v) : fallback;
  }

  double number(const std::string& key, double fallback) const {
    const auto* v = last(key);
    return v ? to_number(key, scalar(key, *v)) : fallback;
  }

  std::vector<double> numbers(const std::string& key, std::vector<double> fallback = {}) const {
    const auto* v = last(key);
    if (!v) return fallback;
    std::vector<double> out;
    for (const auto& item : *v) out.push_back(to_number(key, item));
    return out;
  }

  std::vector<std::size_t> sizes(const std::string& key, std::vector<std::size_t> fallback = {}) const {
    const auto* v = last(key);
    if (!v) return fallback;
    std::vector<std::size_t> out;
    for (const auto& item : *v) {
      out.push_back(to_count(key, item));
    }
    return out;
  }

  std::size_t count(const std::string& key, std::size_t fallback) const {
    const auto* v = last(key);
    return v ? to_count(key, scalar(key, *v)) : fallback;
  }

  std::vector<std::string> strings(const std::string& key, std::vector<std::string> fallback = {}) const {
    const auto* v = last(key);
    return v ? *v : fallback;
  }

  /// Every occurrence of a repeated array key.
  std::vector<std::vector<double>> all_numbers(const std::string& key) const {
    std::vector<std::vector<double>> out;
    auto it = entries_.find(key);
    if (it == entries_.end()) return out;
    for (const auto& v : it->second) {
      std::vector<double> row;
      for (const auto& item : v) row.push_back(to_number(key, item));
      out.push_back(std::move(row));
    }
    return out;
  }

 private:
  using Items = std::vector<std::string>;

  static std::string where(std::size_t lineno) { return "config line " + std::to_string(lineno) + ": "; }

  static std::string strip(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
  }

  static std::string strip_comment(const std::string& s) {
    bool quoted = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == '"') quoted = !quoted;
      if (s[i] == '#' && !quoted) return s.substr(0, i);
    }
    return s;
  }

  static std::string unquote(const std::string& s, std::size_t lineno) {
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
    if (s.find('"') != std::string::npos) throw DataError(where(lineno) + "malformed string");
    return s;
  }

  static Items parse_value(const std::string& raw, std::size_t lineno) {
    if (raw.front() != '[') return {unquote(raw, lineno)};
    if (raw.back() != ']') throw DataError(where(lineno) + "unterminated array");
    Items items;
    std::string inner = raw.substr(1, raw.size() - 2);
    std::size_t start = 0;
    bool quoted = false;
    for (std::size_t i = 0; i <= inner.size(); ++i) {
      if (i < inner.size() && inner[i] == '"') quoted = !quoted;
      if (i == inner.size() || (inner[i] == ',' && !quoted)) {
        const std::string item = strip(inner.substr(start, i - start));
        if (!item.empty()) items.push_back(unquote(item, lineno));
        start = i + 1;
      }
    }
    return items;
  }

  const Items* last(const std::string& key) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? nullptr : &it->second.back();
  }

  static const std::string& scalar(const std::string& key, const Items& v) {
    if (v.size() != 1) throw DataError("config: '" + key + "' expects a single value");
    return v.front();
  }

  static double to_number(const std::string& key, const std::string& s) {
    if (s == "inf") return std::numeric_limits<double>::infinity();
    auto x = detail::parse_number(s);
    if (!x) throw DataError("config: '" + key + "' expects a number, got '" + s + "'");
    return *x;
  }

  static std::size_t to_count(const std::string& key, const std::string& s) {
    const double x = to_number(key, s);
    if (!(x >= 0 && x < 0x1p63) || x != std::floor(x))
      throw DataError("config: '" + key + "' expects non-negative integers");
    return static_cast<std::size_t>(x);
  }

  std::map<std::string, std::vector<Items>> entries_;
};

}  // namespace actfs

#endif  // ACTFS_CONFIG_HPP_
