#include "apisift/text.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "apisift/error.hpp"

namespace apisift {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(start, nl - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    out.emplace_back(line);
    start = nl + 1;
  }
  return out;
}

std::string to_lower_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

namespace {

// Length in bytes of a Unicode space separator starting at s[i], or 0.
std::size_t unicode_space_at(std::string_view s, std::size_t i) {
  const auto b = [&](std::size_t k) { return i + k < s.size() ? static_cast<unsigned char>(s[i + k]) : 0u; };
  if (std::isspace(b(0)) && b(0) < 0x80) return 1;
  if (b(0) == 0xC2 && b(1) == 0xA0) return 2;                                // U+00A0
  if (b(0) == 0xE1 && b(1) == 0x9A && b(2) == 0x80) return 3;                // U+1680
  if (b(0) == 0xE2 && b(1) == 0x80 && (b(2) <= 0x8A || b(2) == 0xA8 || b(2) == 0xA9 || b(2) == 0xAF))
    return b(2) >= 0x80 ? 3 : 0;                                             // U+2000..200A, 2028, 2029, 202F
  if (b(0) == 0xE2 && b(1) == 0x81 && b(2) == 0x9F) return 3;                // U+205F
  if (b(0) == 0xE3 && b(1) == 0x80 && b(2) == 0x80) return 3;                // U+3000
  return 0;
}

}  // namespace

std::vector<std::string> split_unicode_whitespace(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  std::size_t i = 0;
  while (i < s.size()) {
    if (const std::size_t n = unicode_space_at(s, i)) {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
      i += n;
    } else {
      cur += s[i++];
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::string strip_doc_markup(std::string_view doc) {
  std::string out;
  out.reserve(doc.size());
  std::size_t i = 0;
  while (i < doc.size()) {
    const char c = doc[i];
    if (c == '<') {
      // HTML tag: '<' followed by a letter, '/' or '!' up to the closing '>'.
      const char n = i + 1 < doc.size() ? doc[i + 1] : '\0';
      const auto close = doc.find('>', i);
      if ((std::isalpha(static_cast<unsigned char>(n)) || n == '/' || n == '!') && close != std::string_view::npos) {
        out += ' ';
        i = close + 1;
        continue;
      }
    }
    if (c == '{' && i + 1 < doc.size() && doc[i + 1] == '@') {
      // "{@link Foo#bar label}" -> " Foo#bar label "
      i += 2;
      while (i < doc.size() && std::isalpha(static_cast<unsigned char>(doc[i]))) ++i;
      out += ' ';
      continue;
    }
    if (c == '}') {
      ++i;
      continue;
    }
    if (c == '@' && (i == 0 || std::isspace(static_cast<unsigned char>(doc[i - 1]))) && i + 1 < doc.size() &&
        std::isalpha(static_cast<unsigned char>(doc[i + 1]))) {
      ++i;
      while (i < doc.size() && std::isalpha(static_cast<unsigned char>(doc[i]))) ++i;
      out += ' ';
      continue;
    }
    out += c;
    ++i;
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  std::size_t i = 0;
  auto end_row = [&] {
    row.push_back(std::move(field));
    field.clear();
    rows.push_back(std::move(row));
    row.clear();
    field_started = false;
  };
  while (i < text.size()) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          i += 2;
          continue;
        }
        quoted = false;
      } else {
        field += c;
      }
      ++i;
      continue;
    }
    if (c == '"' && field.empty()) {
      quoted = true;
      field_started = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
      field_started = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (field_started || !field.empty() || !row.empty()) end_row();
    } else {
      field += c;
      field_started = true;
    }
    ++i;
  }
  if (quoted) throw FormatError("unterminated quoted CSV field");
  if (field_started || !field.empty() || !row.empty()) end_row();
  return rows;
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string csv_row(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += csv_escape(fields[i]);
  }
  out += '\n';
  return out;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace apisift
