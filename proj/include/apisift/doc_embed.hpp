#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace apisift::doc {

inline constexpr std::size_t kDocDim = 768;

struct DocPipelineConfig {
  std::size_t hash_buckets = std::size_t{1} << 18;
  std::uint64_t projection_seed = 0;
  /// Non-zeros per bucket column of the projection matrix.
  std::size_t nonzeros = 8;
  std::optional<std::map<std::string, double>> idf;
  bool strip_tags = true;

  /// Throws ConfigError when hash_buckets < 768 or nonzeros is not in
  /// [1, 768].
  void validate() const;
  /// The IDF table is summarized by its size, not listed.
  nlohmann::json to_json() const;
};

/// Lowercases, removes doc markup when `strip_tags`, and splits on
/// non-alphanumeric ASCII. Bytes >= 0x80 are kept inside tokens.
std::vector<std::string> normalize_doc(std::string_view text, bool strip_tags = true);

struct DocVector {
  std::vector<double> values;
  bool zero_doc = false;
};

/// Hashed term frequencies (bucket -> weight), IDF-weighted when the config
/// carries a table; tokens absent from the table get weight 1.
std::map<std::size_t, double> hashed_tf(const std::vector<std::string>& tokens, const DocPipelineConfig& cfg);

/// The `nonzeros` (row, sign) entries of a bucket's projection column.
std::vector<std::pair<std::size_t, double>> projection_column(std::size_t bucket, const DocPipelineConfig& cfg);

DocVector embed_doc(const std::vector<std::string>& tokens, const DocPipelineConfig& cfg);

/// Smoothed IDF, ln((1 + N) / (1 + df)) + 1, over the given documents.
std::map<std::string, double> compute_idf(const std::vector<std::vector<std::string>>& docs);

/// Reads a vector file of width 768 and L2-normalizes each row (all-zero
/// rows are kept and flagged). Throws FormatError on any malformed row.
std::map<std::string, DocVector> load_external_vectors(std::string_view text);

}  // namespace apisift::doc
