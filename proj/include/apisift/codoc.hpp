#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "apisift/evalkit.hpp"
#include "apisift/label.hpp"
#include "apisift/neuralnet.hpp"

namespace apisift::codoc {

/// Hidden widths of each three-layer stack; the boundary widths are fixed.
struct ModelConfig {
  std::size_t doc_dim = 768;
  std::size_t code_dim = 384;
  std::size_t branch_dim = 128;
  std::size_t num_classes = 3;
  std::vector<std::size_t> doc_hidden{384, 192};
  std::vector<std::size_t> code_hidden{256, 160};
  std::vector<std::size_t> head_hidden{128, 64};

  /// Throws ConfigError unless the boundaries are 768/384 in, 128 per
  /// branch, 256 concatenated and 3 out, with two positive hidden widths
  /// per stack.
  void validate() const;
  nlohmann::json to_json() const;
  static ModelConfig from_json(const nlohmann::json& j);
};

enum class InputMode { Both, DocOnly, CodeOnly };
std::string to_string(InputMode m);
InputMode parse_input_mode(const std::string& s);

struct CodocModel {
  ModelConfig config;
  InputMode mode = InputMode::Both;
  nn::Network doc_branch;
  nn::Network code_branch;
  nn::Network head;

  std::size_t parameter_count() const;
};

CodocModel build_model(const ModelConfig& cfg, std::uint64_t seed, InputMode mode = InputMode::Both);

/// Same as build_model but without the fixed-boundary check, for small
/// instances in tests.
CodocModel build_model_unchecked(const ModelConfig& cfg, std::uint64_t seed, InputMode mode = InputMode::Both);

struct DualTrace {
  nn::ForwardTrace doc;
  nn::ForwardTrace code;
  nn::ForwardTrace head;
};

/// Batched forward pass (one example per row). Inputs are used as given:
/// the input mode is applied by the callers that read a Dataset.
DualTrace forward(const CodocModel& m, const nn::Matrix& doc, const nn::Matrix& code);

struct DualGradients {
  nn::Gradients doc;
  nn::Gradients code;
  nn::Gradients head;
};

DualGradients backward(const CodocModel& m, const DualTrace& t, const nn::Matrix& logit_grad);
std::vector<nn::ParamSlot> param_slots(CodocModel& m, const DualGradients& g);
std::uint64_t relu_pattern(const CodocModel& m, const DualTrace& t);

struct Example {
  std::string signature;
  nn::Vector doc;
  nn::Vector code;
  Label label = Label::Neither;
};

struct Dataset {
  std::vector<Example> examples;

  std::array<std::size_t, kNumLabels> class_counts() const;
  std::vector<Label> labels() const;
  /// Throws FormatError on a wrong width, a non-finite value or a repeated
  /// signature.
  void validate(std::size_t doc_dim, std::size_t code_dim) const;
};

struct Prediction {
  Label label = Label::Source;
  std::array<double, kNumLabels> probs{};
};

/// Argmax over the probabilities, ties to the earlier label.
Label argmax_label(std::span<const double> scores);

/// Throws ShapeError on a width mismatch.
Prediction predict(const CodocModel& m, std::span<const double> doc, std::span<const double> code);
std::vector<Prediction> predict(const CodocModel& m, const Dataset& d, std::span<const std::size_t> indices);

struct TrainOptions {
  nn::TrainConfig train{};
  /// Loss weight per true class; absent means unweighted.
  std::optional<std::array<double, kNumLabels>> class_weights;
};

/// N / (3 n_c) per class; absent classes get weight 1.
std::array<double, kNumLabels> inverse_frequency_weights(std::span<const Label> labels);

/// Mini-batch training on the selected examples; returns mean epoch losses.
std::vector<double> train_model(CodocModel& m, const Dataset& d, std::span<const std::size_t> indices,
                                const TrainOptions& opt);

struct FoldPlan {
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::vector<std::size_t> fold_of;  // per example index

  std::vector<std::size_t> test_indices(std::size_t fold) const;
  std::vector<std::size_t> train_indices(std::size_t fold) const;
  std::map<std::string, std::size_t> assignment(const Dataset& d) const;
};

/// Each class is shuffled with the seed and dealt round-robin, continuing
/// where the previous class stopped. Throws ConfigError when k < 2 or any
/// class has fewer than k examples.
FoldPlan stratified_kfold(std::span<const Label> labels, std::size_t k, std::uint64_t seed);

struct CrossvalConfig {
  std::size_t k = 10;
  std::uint64_t seed = 0;
  ModelConfig model{};
  TrainOptions options{};
  InputMode mode = InputMode::Both;
  /// When set, every other class is relabeled NEITHER (binary variant).
  std::optional<Label> binary_target;
  /// Train folds on separate threads. Results are identical either way.
  bool parallel = false;
  /// Skip the fixed-boundary check (small models in tests).
  bool unchecked_model = false;

  nlohmann::json to_json() const;
};

struct FoldResult {
  std::size_t fold = 0;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  eval::ConfusionMatrix confusion;
  eval::MetricsReport metrics;
};

/// The A/P/R/F/K columns: for a binary variant P/R/F are those of the
/// target class, otherwise the support-weighted averages.
struct Summary {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double kappa = 0.0;

  nlohmann::json to_json() const;
};

struct CrossvalReport {
  CrossvalConfig config;
  std::vector<FoldResult> folds;
  eval::ConfusionMatrix pooled;
  eval::MetricsReport aggregate;
  Summary summary;
  std::vector<Label> truth;              // dataset order, after relabeling
  std::vector<Prediction> predictions;  // dataset order, from the held-out fold

  nlohmann::json to_json() const;
};

CrossvalReport run_crossval(const Dataset& d, const CrossvalConfig& cfg);

/// Cross-validation with the given input mode (and optional binary target).
CrossvalReport run_ablation(const Dataset& d, InputMode mode, const CrossvalConfig& cfg);

struct Complementarity {
  std::size_t only_a = 0;
  std::size_t only_b = 0;
  std::size_t both = 0;
  std::size_t neither = 0;
  bool operator==(const Complementarity&) const = default;
  nlohmann::json to_json() const;
};

/// Among examples whose truth is `target`, who got them right. Throws
/// LengthMismatch.
Complementarity complementarity(std::span<const Label> a, std::span<const Label> b, std::span<const Label> truth,
                                Label target);

struct SyntheticConfig {
  std::array<std::size_t, kNumLabels> per_class{200, 200, 200};
  /// Distance of each class mean from the origin; 0 makes a space uninformative.
  double doc_separation = 1.0;
  double code_separation = 1.0;
  /// Expected norm of the per-example noise.
  double noise = 1.0;
  std::size_t doc_dim = 768;
  std::size_t code_dim = 384;
  std::uint64_t seed = 0;
};

/// Gaussian clusters per class in each space; doc vectors are L2-normalized.
Dataset make_synthetic(const SyntheticConfig& cfg);

nlohmann::json to_json(const CodocModel& m);
CodocModel model_from_json(const nlohmann::json& j);

inline constexpr int kModelSchemaVersion = 1;

}  // namespace apisift::codoc
