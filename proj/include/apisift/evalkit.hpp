#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "apisift/label.hpp"

namespace apisift::eval {

/// Rows are true labels, columns predictions, in Label order.
struct ConfusionMatrix {
  std::array<std::array<std::uint64_t, kNumLabels>, kNumLabels> counts{};

  void add(Label truth, Label predicted) { ++counts[index_of(truth)][index_of(predicted)]; }
  std::uint64_t total() const;
  /// Throws LengthMismatch when the lists differ in length.
  static ConfusionMatrix from(std::span<const Label> truth, std::span<const Label> predicted);
  bool operator==(const ConfusionMatrix&) const = default;
};

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::uint64_t support = 0;
  // Set when the metric's denominator was zero and 0 was reported instead.
  bool precision_undefined = false;
  bool recall_undefined = false;
  bool f1_undefined = false;
};

struct KappaResult {
  double kappa = 0.0;
  double observed = 0.0;
  double expected = 0.0;
  /// Chance agreement was 1 (or there were no ratings).
  bool degenerate = false;
};

struct MetricsReport {
  std::array<ClassMetrics, kNumLabels> per_class{};
  double accuracy = 0.0;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  double weighted_precision = 0.0;
  double weighted_recall = 0.0;
  double weighted_f1 = 0.0;
  std::optional<KappaResult> kappa;
  std::uint64_t total = 0;

  nlohmann::json to_json() const;
};

/// One-vs-rest metrics per class with support-weighted and macro averages.
/// Kappa treats truth and prediction as two raters.
MetricsReport metrics(const ConfusionMatrix& cm);

/// Cohen's kappa over arbitrary integer categories. Throws LengthMismatch.
KappaResult cohen_kappa(std::span<const int> a, std::span<const int> b);
KappaResult cohen_kappa(std::span<const Label> a, std::span<const Label> b);
/// Kappa from a square agreement table (rows rater A, columns rater B).
KappaResult cohen_kappa(const std::vector<std::vector<std::uint64_t>>& table);

struct OverlapReport {
  std::size_t size_a = 0;
  std::size_t size_b = 0;
  std::size_t both = 0;
  std::size_t only_a = 0;
  std::size_t only_b = 0;

  nlohmann::json to_json() const;
  bool operator==(const OverlapReport&) const = default;
};

OverlapReport overlap(const std::set<std::string>& a, const std::set<std::string>& b);

/// Uniform sample without replacement of `n` distinct entries, sorted. The
/// result does not depend on the order of `list`. Throws ConfigError when n
/// exceeds the number of distinct entries.
std::vector<std::string> sample_for_review(const std::vector<std::string>& list, std::size_t n, std::uint64_t seed);

struct SampleSizeCheck {
  double z = 0.0;
  double infinite_population = 0.0;  // z^2 p (1 - p) / e^2
  double corrected = 0.0;            // n0 / (1 + (n0 - 1) / N)
  std::size_t required = 0;          // ceil(corrected)
  std::size_t sample = 0;
  bool sufficient = false;

  nlohmann::json to_json() const;
};

/// Finite-population sample size for estimating a proportion `p` within
/// +/-`margin` at the given two-sided confidence, compared against `sample`.
/// Throws ConfigError on parameters outside (0, 1) or an empty population.
SampleSizeCheck required_sample_size(std::size_t population, std::size_t sample = 100, double confidence = 0.95,
                                     double margin = 0.10, double p = 0.5);

}  // namespace apisift::eval
