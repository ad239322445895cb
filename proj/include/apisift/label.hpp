#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace apisift {

/// Sensitivity class of an API method. The enumerator order is the fixed
/// tie-breaking order used by every argmax in the project.
enum class Label : int { Source = 0, Sink = 1, Neither = 2 };

inline constexpr int kNumLabels = 3;
inline constexpr std::array<Label, kNumLabels> kAllLabels{Label::Source, Label::Sink, Label::Neither};

inline constexpr std::string_view to_string(Label l) {
  switch (l) {
    case Label::Source: return "SOURCE";
    case Label::Sink: return "SINK";
    case Label::Neither: return "NEITHER";
  }
  return "NEITHER";
}

inline std::optional<Label> parse_label(std::string_view s) {
  if (s == "SOURCE") return Label::Source;
  if (s == "SINK") return Label::Sink;
  if (s == "NEITHER") return Label::Neither;
  return std::nullopt;
}

inline constexpr int index_of(Label l) { return static_cast<int>(l); }
inline constexpr Label label_at(int i) { return static_cast<Label>(i); }

}  // namespace apisift
