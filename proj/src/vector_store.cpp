#include "apisift/vector_store.hpp"

#include <cmath>
#include <set>

#include <nlohmann/json.hpp>

#include "apisift/error.hpp"
#include "apisift/text.hpp"

namespace apisift {

std::string format_vector_line(const VectorRow& row) {
  return nlohmann::json{{"sig", row.sig}, {"vec", row.vec}}.dump();
}

std::string format_vectors(const std::vector<VectorRow>& rows) {
  std::string out;
  for (const auto& r : rows) out += format_vector_line(r) + "\n";
  return out;
}

std::vector<VectorRow> parse_vectors(std::string_view text, std::optional<std::size_t> dim) {
  std::vector<VectorRow> rows;
  std::set<std::string> seen;
  const auto lines = split_lines(text);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    if (trim(lines[n]).empty()) continue;
    const std::string where = "line " + std::to_string(n + 1) + ": ";
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(lines[n]);
    } catch (const nlohmann::json::exception&) {
      throw FormatError(where + "not valid JSON");
    }
    if (!j.is_object() || !j.contains("sig") || !j["sig"].is_string() || !j.contains("vec") || !j["vec"].is_array())
      throw FormatError(where + "expected {\"sig\": string, \"vec\": [numbers]}");
    VectorRow row;
    row.sig = j["sig"].get<std::string>();
    for (const auto& v : j["vec"]) {
      if (!v.is_number()) throw FormatError(where + "vector holds a non-numeric value");
      const double x = v.get<double>();
      if (!std::isfinite(x)) throw FormatError(where + "vector holds a non-finite value");
      row.vec.push_back(x);
    }
    if (dim && row.vec.size() != *dim)
      throw FormatError(where + "vector has " + std::to_string(row.vec.size()) + " values, expected " +
                        std::to_string(*dim));
    if (!seen.insert(row.sig).second) throw FormatError(where + "duplicate signature " + row.sig);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::map<std::string, std::vector<double>> to_map(const std::vector<VectorRow>& rows) {
  std::map<std::string, std::vector<double>> m;
  for (const auto& r : rows) m.emplace(r.sig, r.vec);
  return m;
}

}  // namespace apisift
