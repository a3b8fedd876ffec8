#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "lwsgcn/errors.hpp"

namespace lwsgcn {

/// Minimal TOML-style config reader: [section] / [a.b] headers and
/// key = value lines with strings, booleans, numbers and (nested) arrays.
/// Keys are flattened to "section.key".
class TomlValue;
using TomlArray = std::vector<TomlValue>;

class TomlValue {
 public:
  TomlValue() = default;
  explicit TomlValue(bool b) : value_(b) {}
  explicit TomlValue(std::int64_t i) : value_(i) {}
  explicit TomlValue(double d) : value_(d) {}
  explicit TomlValue(std::string s) : value_(std::move(s)) {}
  explicit TomlValue(TomlArray a) : value_(std::move(a)) {}

  bool is_array() const { return std::holds_alternative<TomlArray>(value_); }
  bool is_string() const { return std::holds_alternative<std::string>(value_); }
  bool is_number() const {
    return std::holds_alternative<std::int64_t>(value_) ||
           std::holds_alternative<double>(value_);
  }

  bool as_bool() const;
  std::int64_t as_int() const;
  double as_double() const;
  const std::string& as_string() const;
  const TomlArray& as_array() const;

 private:
  std::variant<std::monostate, bool, std::int64_t, double, std::string, TomlArray> value_;
};

class TomlTable {
 public:
  static TomlTable parse(const std::string& text);
  static TomlTable parse_file(const std::string& path);

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  const TomlValue& require(const std::string& key) const;

  double get_double(const std::string& key, double fallback) const;
  double require_double(const std::string& key) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  std::int64_t require_int(const std::string& key) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  std::string require_string(const std::string& key) const;
  std::vector<double> require_doubles(const std::string& key) const;
  std::optional<double> maybe_double(const std::string& key) const;

  /// All keys with the given section prefix ("sweep." etc).
  std::vector<std::string> keys_with_prefix(const std::string& prefix) const;

 private:
  std::map<std::string, TomlValue> values_;
};

}  // namespace lwsgcn
