#include "lwsgcn/config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace lwsgcn {

bool TomlValue::as_bool() const {
  if (const bool* b = std::get_if<bool>(&value_)) return *b;
  throw ConfigError("config value is not a boolean");
}

std::int64_t TomlValue::as_int() const {
  if (const auto* i = std::get_if<std::int64_t>(&value_)) return *i;
  throw ConfigError("config value is not an integer");
}

double TomlValue::as_double() const {
  if (const auto* i = std::get_if<std::int64_t>(&value_)) return static_cast<double>(*i);
  if (const auto* d = std::get_if<double>(&value_)) return *d;
  throw ConfigError("config value is not a number");
}

const std::string& TomlValue::as_string() const {
  if (const auto* s = std::get_if<std::string>(&value_)) return *s;
  throw ConfigError("config value is not a string");
}

const TomlArray& TomlValue::as_array() const {
  if (const auto* a = std::get_if<TomlArray>(&value_)) return *a;
  throw ConfigError("config value is not an array");
}

namespace {

struct Cursor {
  const std::string& text;
  std::size_t pos = 0;
  std::int64_t line = 1;

  bool done() const { return pos >= text.size(); }
  char peek() const { return text[pos]; }
  char take() {
    const char c = text[pos++];
    if (c == '\n') ++line;
    return c;
  }
  void skip_ws_inline() {
    while (!done() && (peek() == ' ' || peek() == '\t' || peek() == '\r')) take();
  }
  void skip_ws_and_comments() {
    while (!done()) {
      const char c = peek();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        take();
      } else if (c == '#') {
        while (!done() && peek() != '\n') take();
      } else {
        break;
      }
    }
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError(msg + " at line " + std::to_string(line));
  }
};

std::string parse_bare_token(Cursor& c) {
  std::string out;
  while (!c.done()) {
    const char ch = c.peek();
    if (std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '.' ||
        ch == '-' || ch == '+') {
      out.push_back(c.take());
    } else {
      break;
    }
  }
  return out;
}

TomlValue parse_value(Cursor& c);

TomlValue parse_array(Cursor& c) {
  c.take();  // '['
  TomlArray items;
  while (true) {
    c.skip_ws_and_comments();
    if (c.done()) c.fail("unterminated array");
    if (c.peek() == ']') {
      c.take();
      return TomlValue(std::move(items));
    }
    items.push_back(parse_value(c));
    c.skip_ws_and_comments();
    if (!c.done() && c.peek() == ',') {
      c.take();
    } else if (!c.done() && c.peek() != ']') {
      c.fail("expected ',' or ']' in array");
    }
  }
}

TomlValue parse_value(Cursor& c) {
  c.skip_ws_inline();
  if (c.done()) c.fail("expected a value");
  const char ch = c.peek();
  if (ch == '[') return parse_array(c);
  if (ch == '"') {
    c.take();
    std::string s;
    while (!c.done() && c.peek() != '"') {
      char cc = c.take();
      if (cc == '\\' && !c.done()) {
        const char esc = c.take();
        switch (esc) {
          case 'n': cc = '\n'; break;
          case 't': cc = '\t'; break;
          case '"': cc = '"'; break;
          case '\\': cc = '\\'; break;
          default: c.fail("unknown escape");
        }
      }
      s.push_back(cc);
    }
    if (c.done()) c.fail("unterminated string");
    c.take();
    return TomlValue(std::move(s));
  }
  const std::string token = parse_bare_token(c);
  if (token.empty()) c.fail("expected a value");
  if (token == "true") return TomlValue(true);
  if (token == "false") return TomlValue(false);
  // number: integer when it parses fully as one and has no '.', 'e', 'inf', 'nan'
  const bool looks_float = token.find_first_of(".eEnN") != std::string::npos;
  char* end = nullptr;
  if (!looks_float) {
    const long long i = std::strtoll(token.c_str(), &end, 10);
    if (end == token.c_str() + token.size()) return TomlValue(static_cast<std::int64_t>(i));
  }
  const double d = std::strtod(token.c_str(), &end);
  if (end == token.c_str() + token.size()) return TomlValue(d);
  c.fail("cannot parse value '" + token + "'");
}

}  // namespace

TomlTable TomlTable::parse(const std::string& text) {
  TomlTable table;
  Cursor c{text};
  std::string section;
  while (true) {
    c.skip_ws_and_comments();
    if (c.done()) break;
    if (c.peek() == '[') {
      c.take();
      std::string name;
      while (!c.done() && c.peek() != ']') {
        const char ch = c.take();
        if (ch == '\n') c.fail("unterminated section header");
        name.push_back(ch);
      }
      if (c.done()) c.fail("unterminated section header");
      c.take();  // ']'
      section = name;
      continue;
    }
    const std::string key = parse_bare_token(c);
    if (key.empty()) c.fail("expected a key");
    c.skip_ws_inline();
    if (c.done() || c.peek() != '=') c.fail("expected '=' after key '" + key + "'");
    c.take();
    TomlValue value = parse_value(c);
    const std::string full = section.empty() ? key : section + "." + key;
    if (table.values_.count(full) > 0) c.fail("duplicate key '" + full + "'");
    table.values_.emplace(full, std::move(value));
  }
  return table;
}

TomlTable TomlTable::parse_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw MissingFile("config file not found: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse(ss.str());
}

const TomlValue& TomlTable::require(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing config key '" + key + "'");
  return it->second;
}

double TomlTable::get_double(const std::string& key, double fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second.as_double();
}

double TomlTable::require_double(const std::string& key) const {
  return require(key).as_double();
}

std::int64_t TomlTable::get_int(const std::string& key, std::int64_t fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second.as_int();
}

std::int64_t TomlTable::require_int(const std::string& key) const {
  return require(key).as_int();
}

bool TomlTable::get_bool(const std::string& key, bool fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second.as_bool();
}

std::string TomlTable::get_string(const std::string& key, const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second.as_string();
}

std::string TomlTable::require_string(const std::string& key) const {
  return require(key).as_string();
}

std::vector<double> TomlTable::require_doubles(const std::string& key) const {
  const TomlArray& a = require(key).as_array();
  std::vector<double> out;
  out.reserve(a.size());
  for (const TomlValue& v : a) out.push_back(v.as_double());
  return out;
}

std::optional<double> TomlTable::maybe_double(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second.as_double();
}

std::vector<std::string> TomlTable::keys_with_prefix(const std::string& prefix) const {
  std::vector<std::string> out;
  for (const auto& [k, v] : values_) {
    if (k.rfind(prefix, 0) == 0) out.push_back(k);
  }
  return out;
}

}  // namespace lwsgcn
