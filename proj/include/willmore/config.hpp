/// \file config.hpp
/// \brief Experiment configuration: JSON, or the TOML subset used by the
/// shipped configs, both read into nlohmann::json.
///
/// Supported TOML: comments, [table] and [dotted.table] headers, bare or dotted
/// keys, basic and literal strings, integers (decimal, 0x, 0o, 0b, underscores),
/// floats (with inf/nan), booleans, arrays (multi-line, nested) and inline tables.
/// Not supported: arrays of tables, multi-line strings, dates.
#pragma once

#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include <json.hpp>

#include "willmore/error.hpp"

namespace willmore {

namespace detail {

class TomlParser {
 public:
  explicit TomlParser(std::string text) : s_(std::move(text)) {}

  nlohmann::json parse() {
    nlohmann::json root = nlohmann::json::object();
    nlohmann::json* table = &root;
    for (;;) {
      skip_blank_lines();
      if (eof()) break;
      if (peek() == '[') {
        ++pos_;
        if (peek() == '[') fail("arrays of tables are not supported");
        skip_ws();
        std::vector<std::string> path = parse_key();
        skip_ws();
        expect(']');
        table = &root;
        for (const auto& k : path) {
          nlohmann::json& next = (*table)[k];
          if (next.is_null()) next = nlohmann::json::object();
          if (!next.is_object()) fail("key '" + k + "' is not a table");
          table = &next;
        }
      } else {
        parse_key_value(*table);
      }
      end_of_line();
    }
    return root;
  }

 private:
  std::string s_;
  size_t pos_ = 0;
  int line_ = 1;

  bool eof() const { return pos_ >= s_.size(); }
  char peek() const { return eof() ? '\0' : s_[pos_]; }
  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorKind::ConfigError, "TOML line " + std::to_string(line_) + ": " + msg);
  }
  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }
  void skip_ws() {
    while (!eof() && (peek() == ' ' || peek() == '\t')) ++pos_;
  }
  void skip_comment() {
    if (peek() == '#')
      while (!eof() && peek() != '\n') ++pos_;
  }
  void skip_blank_lines() {
    for (;;) {
      skip_ws();
      skip_comment();
      if (peek() == '\r') ++pos_;
      if (peek() == '\n') {
        ++pos_;
        ++line_;
        continue;
      }
      break;
    }
  }
  // whitespace, comments and newlines inside arrays
  void skip_all() { skip_blank_lines(); }
  void end_of_line() {
    skip_ws();
    skip_comment();
    if (peek() == '\r') ++pos_;
    if (eof()) return;
    if (peek() != '\n') fail("unexpected trailing characters");
    ++pos_;
    ++line_;
  }

  std::vector<std::string> parse_key() {
    std::vector<std::string> parts;
    for (;;) {
      skip_ws();
      if (peek() == '"') {
        parts.push_back(parse_basic_string());
      } else if (peek() == '\'') {
        parts.push_back(parse_literal_string());
      } else {
        const size_t start = pos_;
        while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '-')) ++pos_;
        if (pos_ == start) fail("empty key");
        parts.push_back(s_.substr(start, pos_ - start));
      }
      skip_ws();
      if (peek() != '.') break;
      ++pos_;
    }
    return parts;
  }

  void parse_key_value(nlohmann::json& table) {
    const std::vector<std::string> path = parse_key();
    skip_ws();
    expect('=');
    skip_ws();
    nlohmann::json* t = &table;
    for (size_t i = 0; i + 1 < path.size(); ++i) {
      nlohmann::json& next = (*t)[path[i]];
      if (next.is_null()) next = nlohmann::json::object();
      if (!next.is_object()) fail("key '" + path[i] + "' is not a table");
      t = &next;
    }
    if (t->contains(path.back())) fail("duplicate key '" + path.back() + "'");
    (*t)[path.back()] = parse_value();
  }

  std::string parse_basic_string() {
    expect('"');
    std::string out;
    for (;;) {
      if (eof() || peek() == '\n') fail("unterminated string");
      char c = s_[pos_++];
      if (c == '"') break;
      if (c == '\\') {
        if (eof()) fail("bad escape");
        const char e = s_[pos_++];
        switch (e) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case 'r': out += '\r'; break;
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          default: fail(std::string("unsupported escape \\") + e);
        }
      } else {
        out += c;
      }
    }
    return out;
  }

  std::string parse_literal_string() {
    expect('\'');
    const size_t start = pos_;
    while (!eof() && peek() != '\'' && peek() != '\n') ++pos_;
    if (peek() != '\'') fail("unterminated literal string");
    std::string out = s_.substr(start, pos_ - start);
    ++pos_;
    return out;
  }

  nlohmann::json parse_value() {
    const char c = peek();
    if (c == '"') return parse_basic_string();
    if (c == '\'') return parse_literal_string();
    if (c == '[') return parse_array();
    if (c == '{') return parse_inline_table();
    const size_t start = pos_;
    while (!eof() && !std::isspace(static_cast<unsigned char>(peek())) && peek() != ',' && peek() != ']' &&
           peek() != '}' && peek() != '#')
      ++pos_;
    std::string tok = s_.substr(start, pos_ - start);
    if (tok.empty()) fail("missing value");
    if (tok == "true") return true;
    if (tok == "false") return false;
    return parse_number(tok);
  }

  nlohmann::json parse_number(std::string tok) {
    std::string clean;
    for (char ch : tok)
      if (ch != '_') clean += ch;
    const bool neg = !clean.empty() && clean[0] == '-';
    std::string body = (!clean.empty() && (clean[0] == '+' || clean[0] == '-')) ? clean.substr(1) : clean;
    if (body == "inf") return neg ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
    if (body == "nan") return std::numeric_limits<double>::quiet_NaN();
    int base = 10;
    if (body.size() > 2 && body[0] == '0' && (body[1] == 'x' || body[1] == 'o' || body[1] == 'b')) {
      base = body[1] == 'x' ? 16 : body[1] == 'o' ? 8 : 2;
      body = body.substr(2);
      if (neg) fail("prefixed integers cannot be negative");
    }
    try {
      size_t used = 0;
      const bool is_float = base == 10 && body.find_first_of(".eE") != std::string::npos;
      if (is_float) {
        const double v = std::stod(clean, &used);
        if (used != clean.size()) fail("bad number '" + tok + "'");
        return v;
      }
      const std::uint64_t v = std::stoull(body, &used, base);
      if (used != body.size()) fail("bad number '" + tok + "'");
      if (neg) return -static_cast<std::int64_t>(v);
      if (v > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) return v;
      return static_cast<std::int64_t>(v);
    } catch (const std::logic_error&) {
      fail("bad value '" + tok + "'");
    }
  }

  nlohmann::json parse_array() {
    expect('[');
    nlohmann::json arr = nlohmann::json::array();
    for (;;) {
      skip_all();
      if (peek() == ']') {
        ++pos_;
        return arr;
      }
      arr.push_back(parse_value());
      skip_all();
      if (peek() == ',') {
        ++pos_;
        continue;
      }
      if (peek() == ']') {
        ++pos_;
        return arr;
      }
      fail("expected ',' or ']' in array");
    }
  }

  nlohmann::json parse_inline_table() {
    expect('{');
    nlohmann::json t = nlohmann::json::object();
    skip_ws();
    if (peek() == '}') {
      ++pos_;
      return t;
    }
    for (;;) {
      skip_ws();
      parse_key_value(t);
      skip_ws();
      if (peek() == ',') {
        ++pos_;
        continue;
      }
      expect('}');
      return t;
    }
  }
};

}  // namespace detail

inline nlohmann::json parse_toml(const std::string& text) { return detail::TomlParser(text).parse(); }

/// Reads a .json or .toml file.
inline nlohmann::json load_config_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::ConfigError, "cannot open config " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  const std::string text = ss.str();
  auto ends_with = [&](const std::string& suf) {
    return path.size() >= suf.size() && path.compare(path.size() - suf.size(), suf.size(), suf) == 0;
  };
  if (ends_with(".toml")) return parse_toml(text);
  if (ends_with(".json")) {
    try {
      return nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::ConfigError, std::string("JSON: ") + e.what());
    }
  }
  throw Error(ErrorKind::ConfigError, "config must end in .toml or .json: " + path);
}

}  // namespace willmore
