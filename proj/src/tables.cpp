#include "apisift/tables.hpp"

#include <cmath>
#include <cstdlib>
#include <set>

#include "apisift/error.hpp"
#include "apisift/text.hpp"

namespace apisift {

namespace {

bool blank(const std::vector<std::string>& row) { return row.size() == 1 && trim(row[0]).empty(); }

std::string row_prefix(std::size_t i) { return "row " + std::to_string(i + 1) + ": "; }

Label label_field(const std::string& s, std::size_t i) {
  const auto l = parse_label(trim(s));
  if (!l) throw FormatError(row_prefix(i) + "invalid label '" + s + "'");
  return *l;
}

double prob_field(const std::string& s, std::size_t i) {
  const std::string t = trim(s);
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size() || !std::isfinite(v) || v < 0.0 || v > 1.0)
    throw FormatError(row_prefix(i) + "invalid probability '" + s + "'");
  return v;
}

}  // namespace

std::vector<LabelRow> parse_labels_csv(std::string_view text) {
  const auto rows = parse_csv(text);
  if (rows.empty() || rows[0].size() < 2 || trim(rows[0][0]) != "signature" || trim(rows[0][1]) != "label" ||
      (rows[0].size() == 3 && trim(rows[0][2]) != "rater") || rows[0].size() > 3)
    throw FormatError("labels CSV must start with signature,label[,rater]");
  const std::size_t width = rows[0].size();
  std::vector<LabelRow> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (blank(r)) continue;
    if (r.size() != width) throw FormatError(row_prefix(i) + "expected " + std::to_string(width) + " fields");
    const std::string sig = trim(r[0]);
    if (sig.empty()) throw FormatError(row_prefix(i) + "empty signature");
    out.push_back({sig, label_field(r[1], i), width == 3 ? trim(r[2]) : std::string()});
  }
  return out;
}

std::string format_labels_csv(const std::vector<LabelRow>& rows) {
  std::string out = "signature,label,rater\n";
  for (const auto& r : rows) out += csv_row({r.signature, std::string(to_string(r.label)), r.rater});
  return out;
}

std::map<std::string, Label> resolve_labels(const std::vector<LabelRow>& rows, std::string_view rater) {
  std::map<std::string, Label> out;
  for (const auto& r : rows) {
    if (!rater.empty() && r.rater != rater) continue;
    const auto [it, inserted] = out.emplace(r.signature, r.label);
    if (!inserted && it->second != r.label)
      throw FormatError("conflicting labels for '" + r.signature + "'; select one rater");
  }
  return out;
}

std::string format_predictions_csv(const std::vector<PredictionRow>& rows) {
  std::string out = "signature,label,p_source,p_sink,p_neither\n";
  for (const auto& r : rows)
    out += csv_row({r.signature, std::string(to_string(r.label)), format_double(r.probs[0]), format_double(r.probs[1]),
                    format_double(r.probs[2])});
  return out;
}

std::vector<PredictionRow> parse_predictions_csv(std::string_view text) {
  const auto rows = parse_csv(text);
  if (rows.empty() || rows[0] != std::vector<std::string>{"signature", "label", "p_source", "p_sink", "p_neither"})
    throw FormatError("predictions CSV must start with signature,label,p_source,p_sink,p_neither");
  std::vector<PredictionRow> out;
  std::set<std::string> seen;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (blank(r)) continue;
    if (r.size() != 5) throw FormatError(row_prefix(i) + "expected 5 fields");
    PredictionRow p{trim(r[0]), label_field(r[1], i), {prob_field(r[2], i), prob_field(r[3], i), prob_field(r[4], i)}};
    if (std::abs(p.probs[0] + p.probs[1] + p.probs[2] - 1.0) > 1e-6)
      throw FormatError(row_prefix(i) + "probabilities do not sum to 1");
    if (!seen.insert(p.signature).second) throw FormatError(row_prefix(i) + "repeated signature '" + p.signature + "'");
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace apisift
