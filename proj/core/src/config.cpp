// Copyright 2026 The crisistl Authors.
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

#include "crisistl/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "crisistl/error.hpp"

namespace crisistl {
namespace {

using nlohmann::json;

class TomlParser {
 public:
  explicit TomlParser(std::string_view text) : text_(text) {}

  json parse() {
    json root = json::object();
    json* table = &root;
    while (true) {
      skip_ws_comments_newlines();
      if (eof()) break;
      if (peek() == '[') {
        ++pos_;
        if (!eof() && peek() == '[') fail("arrays of tables are not supported");
        std::vector<std::string> path = parse_key_path();
        skip_inline_ws();
        expect(']');
        table = &root;
        for (const auto& part : path) {
          json& next = (*table)[part];
          if (next.is_null()) next = json::object();
          if (!next.is_object()) fail("'" + part + "' is not a table");
          table = &next;
        }
      } else {
        std::vector<std::string> path = parse_key_path();
        skip_inline_ws();
        expect('=');
        skip_inline_ws();
        json value = parse_value();
        assign(*table, path, std::move(value));
      }
      end_of_line();
    }
    return root;
  }

 private:
  bool eof() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }

  [[noreturn]] void fail(const std::string& what) const {
    std::size_t line = 1;
    for (std::size_t i = 0; i < pos_ && i < text_.size(); ++i) {
      if (text_[i] == '\n') ++line;
    }
    throw DataError("config: " + what, line);
  }

  void expect(char c) {
    if (eof() || peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  void skip_inline_ws() {
    while (!eof() && (peek() == ' ' || peek() == '\t')) ++pos_;
  }

  void skip_comment() {
    if (!eof() && peek() == '#') {
      while (!eof() && peek() != '\n') ++pos_;
    }
  }

  void skip_ws_comments_newlines() {
    while (!eof()) {
      char c = peek();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        ++pos_;
      } else if (c == '#') {
        skip_comment();
      } else {
        break;
      }
    }
  }

  void end_of_line() {
    skip_inline_ws();
    skip_comment();
    if (eof()) return;
    if (peek() == '\r') ++pos_;
    if (eof()) return;
    if (peek() != '\n') fail("unexpected trailing characters");
    ++pos_;
  }

  std::vector<std::string> parse_key_path() {
    std::vector<std::string> path;
    while (true) {
      skip_inline_ws();
      path.push_back(parse_key_part());
      skip_inline_ws();
      if (!eof() && peek() == '.') {
        ++pos_;
        continue;
      }
      return path;
    }
  }

  std::string parse_key_part() {
    if (eof()) fail("expected a key");
    if (peek() == '"') return parse_basic_string();
    if (peek() == '\'') return parse_literal_string();
    std::size_t start = pos_;
    while (!eof()) {
      char c = peek();
      bool bare = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                  (c >= '0' && c <= '9') || c == '_' || c == '-';
      if (!bare) break;
      ++pos_;
    }
    if (start == pos_) fail("expected a key");
    return std::string(text_.substr(start, pos_ - start));
  }

  static void append_utf8(std::string& out, unsigned long cp) {
    if (cp < 0x80) {
      out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
      out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
      out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
      out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
  }

  std::string parse_basic_string() {
    expect('"');
    std::string out;
    while (true) {
      if (eof() || peek() == '\n') fail("unterminated string");
      char c = text_[pos_++];
      if (c == '"') return out;
      if (c != '\\') {
        out.push_back(c);
        continue;
      }
      if (eof()) fail("unterminated escape");
      char e = text_[pos_++];
      switch (e) {
        case 'n': out.push_back('\n'); break;
        case 't': out.push_back('\t'); break;
        case 'r': out.push_back('\r'); break;
        case '"': out.push_back('"'); break;
        case '\\': out.push_back('\\'); break;
        case 'u':
        case 'U': {
          std::size_t n = e == 'u' ? 4 : 8;
          if (pos_ + n > text_.size()) fail("truncated unicode escape");
          unsigned long cp = 0;
          auto [p, ec] = std::from_chars(text_.data() + pos_, text_.data() + pos_ + n, cp, 16);
          if (ec != std::errc{} || p != text_.data() + pos_ + n) fail("bad unicode escape");
          pos_ += n;
          append_utf8(out, cp);
          break;
        }
        default: fail(std::string("unknown escape \\") + e);
      }
    }
  }

  std::string parse_literal_string() {
    expect('\'');
    std::size_t start = pos_;
    while (!eof() && peek() != '\'' && peek() != '\n') ++pos_;
    if (eof() || peek() != '\'') fail("unterminated literal string");
    std::string out(text_.substr(start, pos_ - start));
    ++pos_;
    return out;
  }

  json parse_value() {
    if (eof()) fail("expected a value");
    char c = peek();
    if (c == '"') return parse_basic_string();
    if (c == '\'') return parse_literal_string();
    if (c == '[') return parse_array();
    if (c == '{') return parse_inline_table();
    if (text_.substr(pos_, 4) == "true") {
      pos_ += 4;
      return true;
    }
    if (text_.substr(pos_, 5) == "false") {
      pos_ += 5;
      return false;
    }
    return parse_number();
  }

  json parse_number() {
    std::size_t start = pos_;
    while (!eof()) {
      char c = peek();
      if ((c >= '0' && c <= '9') || c == '+' || c == '-' || c == '.' || c == 'e' ||
          c == 'E' || c == '_') {
        ++pos_;
      } else {
        break;
      }
    }
    std::string token;
    for (char c : text_.substr(start, pos_ - start)) {
      if (c != '_') token.push_back(c);
    }
    if (token.empty()) fail("expected a value");
    if (token[0] == '+') token.erase(0, 1);
    bool is_float = token.find_first_of(".eE") != std::string::npos;
    if (!is_float) {
      long long v = 0;
      auto [p, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
      if (ec != std::errc{} || p != token.data() + token.size()) fail("bad integer '" + token + "'");
      return v;
    }
    try {
      std::size_t used = 0;
      double v = std::stod(token, &used);
      if (used != token.size()) fail("bad float '" + token + "'");
      return v;
    } catch (const std::logic_error&) {
      fail("bad float '" + token + "'");
    }
  }

  json parse_array() {
    expect('[');
    json arr = json::array();
    while (true) {
      skip_ws_comments_newlines();
      if (eof()) fail("unterminated array");
      if (peek() == ']') {
        ++pos_;
        return arr;
      }
      arr.push_back(parse_value());
      skip_ws_comments_newlines();
      if (!eof() && peek() == ',') {
        ++pos_;
        continue;
      }
      skip_ws_comments_newlines();
      expect(']');
      return arr;
    }
  }

  json parse_inline_table() {
    expect('{');
    json table = json::object();
    skip_inline_ws();
    if (!eof() && peek() == '}') {
      ++pos_;
      return table;
    }
    while (true) {
      std::vector<std::string> path = parse_key_path();
      skip_inline_ws();
      expect('=');
      skip_inline_ws();
      assign(table, path, parse_value());
      skip_inline_ws();
      if (!eof() && peek() == ',') {
        ++pos_;
        continue;
      }
      expect('}');
      return table;
    }
  }

  void assign(json& table, const std::vector<std::string>& path, json value) {
    json* cur = &table;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      json& next = (*cur)[path[i]];
      if (next.is_null()) next = json::object();
      if (!next.is_object()) fail("'" + path[i] + "' is not a table");
      cur = &next;
    }
    if (cur->contains(path.back())) fail("duplicate key '" + path.back() + "'");
    (*cur)[path.back()] = std::move(value);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

nlohmann::json parse_toml(std::string_view text) { return TomlParser(text).parse(); }

nlohmann::json load_toml_file(const std::filesystem::path& path) {
  return parse_toml(read_file(path));
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw DataError("short write to '" + path.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  std::size_t line = 1;
  auto end_row = [&] {
    row.push_back(std::move(field));
    field.clear();
    bool blank = row.size() == 1 && row[0].empty();
    if (!blank) rows.push_back(std::move(row));
    row.clear();
    field_started = false;
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (field_started) throw DataError("csv: stray quote", line);
        quoted = true;
        field_started = true;
        break;
      case ',':
        row.push_back(std::move(field));
        field.clear();
        field_started = false;
        break;
      case '\r':
        break;
      case '\n':
        end_row();
        ++line;
        break;
      default:
        field.push_back(c);
        field_started = true;
    }
  }
  if (quoted) throw DataError("csv: unterminated quoted field", line);
  if (!field.empty() || !row.empty()) end_row();
  return rows;
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path) {
  return parse_csv(read_file(path));
}

}  // namespace crisistl
