#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace apisift {

std::string trim(std::string_view s);
std::vector<std::string> split_lines(std::string_view text);
std::string to_lower_ascii(std::string_view s);

/// Splits on ASCII whitespace and the Unicode space separators (U+00A0,
/// U+1680, U+2000..U+200A, U+2028, U+2029, U+202F, U+205F, U+3000) encoded
/// as UTF-8.
std::vector<std::string> split_unicode_whitespace(std::string_view s);

/// Removes doc markup while keeping its payload words: HTML tags, block tag
/// markers such as "@param" and the "{@link ...}" brace syntax.
std::string strip_doc_markup(std::string_view doc);

std::string read_file(const std::string& path);

/// Minimal RFC 4180 CSV: quoted fields may contain commas, quotes ("") and
/// newlines.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);
std::string csv_escape(std::string_view field);
std::string csv_row(const std::vector<std::string>& fields);

/// Shortest decimal text that round-trips the double.
std::string format_double(double v);

}  // namespace apisift
