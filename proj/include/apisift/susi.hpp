#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "apisift/codoc.hpp"
#include "apisift/extractor.hpp"
#include "apisift/label.hpp"
#include "apisift/neuralnet.hpp"

// Signature-only baseline: hand-picked header features and a one-vs-rest
// logistic regression. It never looks at method bodies.
namespace apisift::susi {

/// Keyword lists behind the features. Changing any list changes `version`.
struct FeatureSpec {
  std::string version = "sigfeat-1";
  std::vector<std::string> name_prefixes{"get", "set",  "put",  "send", "write",  "read",
                                         "open", "close", "is", "has",  "update", "query"};
  std::vector<std::string> class_keywords{"manager", "service", "telephony", "location", "sms", "net"};

  std::size_t width() const;
  std::vector<std::string> feature_names() const;
  nlohmann::json to_json() const;
  static FeatureSpec from_json(const nlohmann::json& j);
};

enum class TypeClass { Void, Primitive, String, Array, Object };
TypeClass classify_type(std::string_view type);

/// Prefix match on a camelCase boundary: "getImei" has prefix "get",
/// "settings" does not have "set".
bool has_name_prefix(std::string_view name, std::string_view prefix);

/// 0/1 vector in feature_names() order.
std::vector<double> extract_features(const MethodRecord& r, const FeatureSpec& spec = {});

struct BaselineConfig {
  nn::TrainConfig train = default_train();
  double l2 = 0.0;

  static nn::TrainConfig default_train();
  void validate(bool allow_zero_lr = false) const;
  nlohmann::json to_json() const;
  static BaselineConfig from_json(const nlohmann::json& j);
};

struct BaselineModel {
  FeatureSpec spec;
  nn::Matrix weights;  // kNumLabels x width
  nn::Vector bias;     // kNumLabels

  std::size_t width() const { return static_cast<std::size_t>(weights.cols()); }
};

BaselineModel zero_model(const FeatureSpec& spec = {});

struct TrainResult {
  BaselineModel model;
  std::vector<double> epoch_losses;
};

/// Mean over examples of the summed per-class binary cross-entropies.
double ovr_loss(const BaselineModel& m, std::span<const std::vector<double>> x, std::span<const Label> y,
                double l2 = 0.0, BaselineModel* grad = nullptr);

/// Throws LengthMismatch when x and y differ in length, ShapeError on a
/// feature row of the wrong width, ConfigError on an invalid config or an
/// empty training set.
TrainResult train_baseline(std::span<const std::vector<double>> x, std::span<const Label> y,
                           const BaselineConfig& cfg, const FeatureSpec& spec = {});

/// Softmax over the three one-vs-rest scores. Throws ShapeError on a width
/// mismatch.
codoc::Prediction predict_baseline(const BaselineModel& m, std::span<const double> features);

nlohmann::json to_json(const BaselineModel& m);
BaselineModel baseline_from_json(const nlohmann::json& j);

struct LabeledRecord {
  MethodRecord record;
  Label label = Label::Neither;
};

/// Labels follow the method-name prefix: get/query/read are SOURCE,
/// send/write/put/set/update are SINK, everything else NEITHER. All other
/// header fields and the body are drawn at random.
std::vector<LabeledRecord> make_rule_dataset(std::size_t per_class, std::uint64_t seed);
Label rule_label(std::string_view method_name);

/// Labels depend only on the body; headers are drawn independently of the
/// label from one shared distribution.
std::vector<LabeledRecord> make_body_only_dataset(std::size_t per_class, std::uint64_t seed);

struct CrossvalAccuracy {
  double accuracy = 0;
  eval::ConfusionMatrix confusion;
};

/// Stratified k-fold held-out accuracy of the baseline on a labelled set.
CrossvalAccuracy crossval_accuracy(std::span<const LabeledRecord> data, std::size_t k, const BaselineConfig& cfg,
                                   std::uint64_t seed);

}  // namespace apisift::susi
