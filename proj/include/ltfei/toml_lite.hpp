#pragma once

// A small TOML reader covering what experiment configs use: [tables] and
// [dotted.tables], bare or quoted keys, basic strings, integers (with _ digit
// separators), floats, booleans, arrays (possibly spanning lines) and inline
// tables. The result is a JSON value so configs from either format share one
// validator. Dates, literal strings and arrays of tables are not supported.

#include <cctype>
#include <cstdint>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "ltfei/errors.hpp"

namespace ltfei {

namespace detail {

class TomlParser {
 public:
  explicit TomlParser(std::string_view text) : s_(text) {}

  nlohmann::json parse() {
    nlohmann::json root = nlohmann::json::object();
    nlohmann::json* table = &root;
    for (;;) {
      skip_blank_lines();
      if (at_end()) break;
      if (peek() == '[') {
        ++pos_;
        skip_space();
        table = &root;
        for (;;) {
          const std::string key = parse_key();
          auto& next = (*table)[key];
          if (next.is_null()) next = nlohmann::json::object();
          if (!next.is_object()) fail("table header names a non-table key \"" + key + "\"");
          table = &next;
          skip_space();
          if (peek() == '.') {
            ++pos_;
            skip_space();
            continue;
          }
          break;
        }
        expect(']');
      } else {
        parse_key_value(*table);
      }
      end_of_line();
    }
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ValidationError("TOML line " + std::to_string(line_) + ": " + what);
  }

  bool at_end() const { return pos_ >= s_.size(); }
  char peek() const { return at_end() ? '\0' : s_[pos_]; }

  void skip_space() {
    while (!at_end() && (peek() == ' ' || peek() == '\t')) ++pos_;
  }
  void skip_comment() {
    if (peek() == '#') {
      while (!at_end() && peek() != '\n') ++pos_;
    }
  }
  void skip_blank_lines() {
    for (;;) {
      skip_space();
      skip_comment();
      if (peek() == '\r') ++pos_;
      if (peek() != '\n') return;
      ++pos_;
      ++line_;
    }
  }
  /// Whitespace, comments and newlines, used inside arrays.
  void skip_all() {
    for (;;) {
      skip_space();
      skip_comment();
      if (peek() == '\r') ++pos_;
      if (peek() != '\n') return;
      ++pos_;
      ++line_;
    }
  }
  void end_of_line() {
    skip_space();
    skip_comment();
    if (peek() == '\r') ++pos_;
    if (at_end()) return;
    if (peek() != '\n') fail("unexpected trailing characters");
    ++pos_;
    ++line_;
  }
  void expect(char c) {
    skip_space();
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  std::string parse_key() {
    if (peek() == '"') return parse_string();
    const std::size_t start = pos_;
    while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '-')) ++pos_;
    if (pos_ == start) fail("expected a key");
    return std::string(s_.substr(start, pos_ - start));
  }

  void parse_key_value(nlohmann::json& table) {
    nlohmann::json* target = &table;
    std::string key = parse_key();
    skip_space();
    while (peek() == '.') {
      ++pos_;
      skip_space();
      auto& next = (*target)[key];
      if (next.is_null()) next = nlohmann::json::object();
      if (!next.is_object()) fail("dotted key crosses a non-table \"" + key + "\"");
      target = &next;
      key = parse_key();
      skip_space();
    }
    expect('=');
    skip_space();
    if (target->contains(key)) fail("duplicate key \"" + key + "\"");
    (*target)[key] = parse_value();
  }

  std::string parse_string() {
    ++pos_;  // opening quote
    std::string out;
    for (;;) {
      if (at_end() || peek() == '\n') fail("unterminated string");
      const char c = s_[pos_++];
      if (c == '"') return out;
      if (c != '\\') {
        out += c;
        continue;
      }
      if (at_end()) fail("unterminated escape");
      const char e = s_[pos_++];
      switch (e) {
        case 'n':
          out += '\n';
          break;
        case 't':
          out += '\t';
          break;
        case 'r':
          out += '\r';
          break;
        case '"':
          out += '"';
          break;
        case '\\':
          out += '\\';
          break;
        default:
          fail(std::string("unsupported escape \\") + e);
      }
    }
  }

  nlohmann::json parse_value() {
    const char c = peek();
    if (c == '"') return parse_string();
    if (c == '[') return parse_array();
    if (c == '{') return parse_inline_table();
    const std::size_t start = pos_;
    while (!at_end() && peek() != ',' && peek() != ']' && peek() != '}' && peek() != '#' && peek() != '\n' &&
           peek() != '\r' && peek() != ' ' && peek() != '\t') {
      ++pos_;
    }
    std::string token(s_.substr(start, pos_ - start));
    if (token.empty()) fail("expected a value");
    if (token == "true") return true;
    if (token == "false") return false;
    if (token == "inf" || token == "+inf" || token == "-inf" || token == "nan") fail("non-finite values are not accepted");
    std::string digits;
    for (std::size_t k = 0; k < token.size(); ++k) {
      if (token[k] == '_') {
        if (k == 0 || k + 1 == token.size() || !std::isdigit(static_cast<unsigned char>(token[k - 1])) ||
            !std::isdigit(static_cast<unsigned char>(token[k + 1]))) {
          fail("misplaced '_' in number");
        }
        continue;
      }
      digits += token[k];
    }
    const bool is_float = digits.find_first_of(".eE") != std::string::npos;
    std::size_t used = 0;
    try {
      if (is_float) {
        const double v = std::stod(digits, &used);
        if (used == digits.size()) return v;
      } else if (!digits.empty() && digits[0] == '-') {
        const long long v = std::stoll(digits, &used);
        if (used == digits.size()) return v;
      } else {
        const unsigned long long v = std::stoull(digits[0] == '+' ? digits.substr(1) : digits, &used);
        if (used + (digits[0] == '+' ? 1 : 0) == digits.size()) return static_cast<std::uint64_t>(v);
      }
    } catch (const std::exception&) {
    }
    fail("invalid value \"" + token + "\"");
  }

  nlohmann::json parse_array() {
    ++pos_;
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
      if (peek() != ']') fail("expected ',' or ']' in array");
    }
  }

  nlohmann::json parse_inline_table() {
    ++pos_;
    nlohmann::json table = nlohmann::json::object();
    skip_space();
    if (peek() == '}') {
      ++pos_;
      return table;
    }
    for (;;) {
      skip_space();
      parse_key_value(table);
      skip_space();
      if (peek() == ',') {
        ++pos_;
        continue;
      }
      if (peek() != '}') fail("expected ',' or '}' in inline table");
      ++pos_;
      return table;
    }
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
};

}  // namespace detail

inline nlohmann::json parse_toml(std::string_view text) { return detail::TomlParser(text).parse(); }

}  // namespace ltfei
