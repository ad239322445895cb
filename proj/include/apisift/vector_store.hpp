#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace apisift {

/// One line of a vector file: {"sig": ..., "vec": [...]}.
struct VectorRow {
  std::string sig;
  std::vector<double> vec;
  bool operator==(const VectorRow&) const = default;
};

std::string format_vector_line(const VectorRow& row);
std::string format_vectors(const std::vector<VectorRow>& rows);

/// Parses JSON Lines; blank lines are ignored. Throws FormatError (with the
/// line number) on malformed JSON, non-finite or non-numeric values, a
/// width other than `dim` when given, or a repeated signature.
std::vector<VectorRow> parse_vectors(std::string_view text, std::optional<std::size_t> dim = std::nullopt);

std::map<std::string, std::vector<double>> to_map(const std::vector<VectorRow>& rows);

}  // namespace apisift
