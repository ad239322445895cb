#include "apisift/doc_embed.hpp"

#include <cctype>
#include <cmath>
#include <set>

#include "apisift/error.hpp"
#include "apisift/rng.hpp"
#include "apisift/text.hpp"
#include "apisift/vector_store.hpp"

namespace apisift::doc {

void DocPipelineConfig::validate() const {
  if (hash_buckets < kDocDim) throw ConfigError("hashBuckets must be at least 768");
  if (nonzeros < 1 || nonzeros > kDocDim) throw ConfigError("projection non-zeros must be in [1, 768]");
}

nlohmann::json DocPipelineConfig::to_json() const {
  return {{"hashBuckets", hash_buckets},
          {"projectionSeed", projection_seed},
          {"nonzeros", nonzeros},
          {"idfTerms", idf ? nlohmann::json(idf->size()) : nlohmann::json(nullptr)},
          {"stripTags", strip_tags}};
}

std::vector<std::string> normalize_doc(std::string_view text, bool strip_tags) {
  const std::string lowered = to_lower_ascii(strip_tags ? strip_doc_markup(text) : std::string(text));
  std::vector<std::string> out;
  std::string cur;
  for (unsigned char c : lowered) {
    if (std::isalnum(c) || c >= 0x80) {
      cur += static_cast<char>(c);
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::map<std::size_t, double> hashed_tf(const std::vector<std::string>& tokens, const DocPipelineConfig& cfg) {
  std::map<std::size_t, double> tf;
  for (const auto& t : tokens) {
    double w = 1.0;
    if (cfg.idf) {
      const auto it = cfg.idf->find(t);
      if (it != cfg.idf->end()) w = it->second;
    }
    tf[static_cast<std::size_t>(fnv1a64(t) % cfg.hash_buckets)] += w;
  }
  return tf;
}

std::vector<std::pair<std::size_t, double>> projection_column(std::size_t bucket, const DocPipelineConfig& cfg) {
  const double scale = 1.0 / std::sqrt(static_cast<double>(cfg.nonzeros));
  std::vector<std::pair<std::size_t, double>> col;
  std::set<std::size_t> used;
  std::uint64_t state = mix_seed(cfg.projection_seed ^ mix_seed(bucket));
  while (col.size() < cfg.nonzeros) {
    state = mix_seed(state);
    const std::size_t row = static_cast<std::size_t>(state % kDocDim);
    if (!used.insert(row).second) continue;
    col.emplace_back(row, (state >> 63) ? -scale : scale);
  }
  return col;
}

DocVector embed_doc(const std::vector<std::string>& tokens, const DocPipelineConfig& cfg) {
  cfg.validate();
  DocVector out;
  out.values.assign(kDocDim, 0.0);
  for (const auto& [bucket, w] : hashed_tf(tokens, cfg))
    for (const auto& [row, sign] : projection_column(bucket, cfg)) out.values[row] += sign * w;
  double norm = 0.0;
  for (double v : out.values) norm += v * v;
  norm = std::sqrt(norm);
  if (norm == 0.0) {
    out.zero_doc = true;
    return out;
  }
  for (double& v : out.values) v /= norm;
  return out;
}

std::map<std::string, double> compute_idf(const std::vector<std::vector<std::string>>& docs) {
  std::map<std::string, std::size_t> df;
  for (const auto& d : docs)
    for (const auto& t : std::set<std::string>(d.begin(), d.end())) ++df[t];
  std::map<std::string, double> idf;
  const double n = static_cast<double>(docs.size());
  for (const auto& [t, c] : df) idf[t] = std::log((1.0 + n) / (1.0 + static_cast<double>(c))) + 1.0;
  return idf;
}

std::map<std::string, DocVector> load_external_vectors(std::string_view text) {
  std::map<std::string, DocVector> out;
  for (auto& row : parse_vectors(text, kDocDim)) {
    DocVector v;
    double norm = 0.0;
    for (double x : row.vec) norm += x * x;
    norm = std::sqrt(norm);
    v.zero_doc = norm == 0.0;
    if (!v.zero_doc)
      for (double& x : row.vec) x /= norm;
    v.values = std::move(row.vec);
    out.emplace(std::move(row.sig), std::move(v));
  }
  return out;
}

}  // namespace apisift::doc
