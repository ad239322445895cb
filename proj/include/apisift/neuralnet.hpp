#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "apisift/rng.hpp"

namespace apisift::nn {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

enum class Activation { Relu, Tanh, Identity, Sigmoid };

std::string to_string(Activation a);
Activation parse_activation(const std::string& s);

/// y = act(W x + b), W is out x in.
struct DenseLayer {
  Matrix weights;
  Vector bias;
  Activation activation = Activation::Identity;

  std::size_t in() const { return static_cast<std::size_t>(weights.cols()); }
  std::size_t out() const { return static_cast<std::size_t>(weights.rows()); }
  std::size_t parameter_count() const { return weights.size() + bias.size(); }
};

using Network = std::vector<DenseLayer>;

/// Uniform He-style initialization, U(-sqrt(6/fan_in), +sqrt(6/fan_in)),
/// zero bias.
DenseLayer make_layer(std::size_t in, std::size_t out, Activation act, Rng& rng);

/// Checks that consecutive layers chain; throws ShapeError otherwise.
void validate(std::span<const DenseLayer> layers);
std::size_t parameter_count(std::span<const DenseLayer> layers);

/// Activations of a batch (one example per row) through every layer.
/// inputs[i] feeds layer i, pre[i] is its affine output, post[i] the
/// activated output; post.back() is the network output.
struct ForwardTrace {
  std::vector<Matrix> inputs;
  std::vector<Matrix> pre;
  std::vector<Matrix> post;

  const Matrix& output() const { return post.back(); }
};

ForwardTrace forward(std::span<const DenseLayer> layers, const Matrix& batch);
ForwardTrace forward(std::span<const DenseLayer> layers, std::span<const double> input);

struct LossResult {
  double loss = 0.0;
  Vector probabilities;
};

/// Max-subtracted softmax and the negative log-likelihood of `true_class`.
/// Throws IndexError if the class is out of range.
LossResult softmax_cross_entropy(std::span<const double> logits, std::size_t true_class);
Vector softmax(std::span<const double> logits);

struct LayerGradient {
  Matrix weights;
  Vector bias;
};

struct Gradients {
  std::vector<LayerGradient> layers;
  Matrix input;  // d loss / d input, one row per example
};

/// Exact gradients of sum_rows(loss) given d loss / d output for each row of
/// the batch. Throws ShapeError when the trace or gradient do not match.
Gradients backward(std::span<const DenseLayer> layers, const ForwardTrace& trace, const Matrix& output_grad);

enum class OptimizerKind { Sgd, Adam };

struct TrainConfig {
  double learning_rate = 1e-3;
  int epochs = 10;
  int batch_size = 32;
  std::uint64_t seed = 0;
  OptimizerKind optimizer = OptimizerKind::Adam;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  /// Throws ConfigError: learning_rate must be > 0 unless `allow_zero_lr`
  /// (used to check that a zero step leaves parameters untouched).
  void validate(bool allow_zero_lr = false) const;
  nlohmann::json to_json() const;
  static TrainConfig from_json(const nlohmann::json& j);
};

/// A parameter tensor and its gradient, viewed as flat arrays.
struct ParamSlot {
  std::span<double> value;
  std::span<const double> grad;
};

/// SGD or Adam over a fixed list of parameter slots. Adam moments are keyed
/// by slot position, so the slot list must be built in the same order on
/// every step.
class Optimizer {
 public:
  explicit Optimizer(const TrainConfig& cfg) : cfg_(cfg) {}
  void step(const std::vector<ParamSlot>& slots);
  std::uint64_t steps() const { return t_; }

 private:
  TrainConfig cfg_;
  std::uint64_t t_ = 0;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
};

std::vector<ParamSlot> param_slots(Network& layers, const Gradients& grads);

struct Example {
  Vector input;
  std::size_t label = 0;
};

/// One optimizer step on the mean softmax cross-entropy of the batch.
/// Returns the mean batch loss before the update.
double train_step(Network& layers, std::span<const Example> batch, Optimizer& opt);
double train_step(Network& layers, std::span<const Example> batch, const TrainConfig& cfg);

/// Mini-batch training with per-epoch shuffling drawn from cfg.seed.
/// Returns the mean loss of each epoch.
std::vector<double> train(Network& layers, std::span<const Example> data, const TrainConfig& cfg);

std::size_t predict_class(std::span<const DenseLayer> layers, std::span<const double> input);

nlohmann::json to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j);
nlohmann::json to_json(const DenseLayer& layer);
DenseLayer layer_from_json(const nlohmann::json& j);
nlohmann::json to_json(std::span<const DenseLayer> layers);
Network network_from_json(const nlohmann::json& j);

inline constexpr int kCheckpointSchemaVersion = 1;

/// Central finite-difference check of analytic gradients.
struct GradCheckOptions {
  double step = 1e-5;
  /// Denominator floor for the relative error
  /// |analytic - numeric| / max(|analytic|, |numeric|, floor).
  double floor = 1e-6;
  /// Entries checked per slot; 0 checks every entry.
  std::size_t samples_per_slot = 0;
  std::uint64_t seed = 0;
};

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::size_t checked = 0;
  /// Entries skipped because the perturbation crossed a ReLU kink.
  std::size_t skipped = 0;
};

/// `loss` recomputes the objective from the current parameter values.
/// `pattern`, when given, fingerprints the piecewise-linear region (e.g.
/// the ReLU masks); entries whose +/- perturbation changes it are skipped.
GradCheckResult check_gradients(const std::vector<ParamSlot>& slots, const std::function<double()>& loss,
                                const std::function<std::uint64_t()>& pattern = {}, GradCheckOptions opt = {});

/// Fingerprint of the ReLU on/off pattern of a trace.
std::uint64_t relu_pattern(std::span<const DenseLayer> layers, const ForwardTrace& trace,
                           std::uint64_t h = 0xcbf29ce484222325ULL);

}  // namespace apisift::nn
