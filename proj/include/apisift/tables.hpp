#pragma once

#include <array>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "apisift/label.hpp"

// CSV tables exchanged between commands: rater labels and predictions.
namespace apisift {

struct LabelRow {
  std::string signature;
  Label label = Label::Neither;
  std::string rater;

  bool operator==(const LabelRow&) const = default;
};

/// `signature,label,rater` with a header; the rater column may be omitted.
/// Throws FormatError naming the row on a bad label or field count.
std::vector<LabelRow> parse_labels_csv(std::string_view text);
std::string format_labels_csv(const std::vector<LabelRow>& rows);

/// One label per signature. Rows from other raters are dropped when `rater`
/// is non-empty. Throws FormatError when a signature carries two different
/// labels.
std::map<std::string, Label> resolve_labels(const std::vector<LabelRow>& rows, std::string_view rater = {});

struct PredictionRow {
  std::string signature;
  Label label = Label::Neither;
  std::array<double, kNumLabels> probs{};

  bool operator==(const PredictionRow&) const = default;
};

/// `signature,label,p_source,p_sink,p_neither`. Probabilities are written
/// with round-trip precision.
std::string format_predictions_csv(const std::vector<PredictionRow>& rows);

/// Throws FormatError on a bad header, label or probability, on
/// probabilities that do not sum to 1 within 1e-6 and on repeated
/// signatures.
std::vector<PredictionRow> parse_predictions_csv(std::string_view text);

}  // namespace apisift
