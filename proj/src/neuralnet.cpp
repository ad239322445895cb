#include "apisift/neuralnet.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "apisift/error.hpp"

namespace apisift::nn {

namespace {

Matrix activate(const Matrix& pre, Activation a) {
  switch (a) {
    case Activation::Relu: return pre.cwiseMax(0.0);
    case Activation::Tanh: return pre.array().tanh().matrix();
    case Activation::Sigmoid: return (1.0 / (1.0 + (-pre.array()).exp())).matrix();
    case Activation::Identity: break;
  }
  return pre;
}

// d post / d pre, elementwise.
Matrix derivative(const Matrix& pre, const Matrix& post, Activation a) {
  switch (a) {
    case Activation::Relu: return (pre.array() > 0.0).cast<double>().matrix();
    case Activation::Tanh: return (1.0 - post.array().square()).matrix();
    case Activation::Sigmoid: return (post.array() * (1.0 - post.array())).matrix();
    case Activation::Identity: break;
  }
  return Matrix::Ones(pre.rows(), pre.cols());
}

std::string shape(Eigen::Index r, Eigen::Index c) { return std::to_string(r) + "x" + std::to_string(c); }

}  // namespace

std::string to_string(Activation a) {
  switch (a) {
    case Activation::Relu: return "relu";
    case Activation::Tanh: return "tanh";
    case Activation::Sigmoid: return "sigmoid";
    case Activation::Identity: break;
  }
  return "identity";
}

Activation parse_activation(const std::string& s) {
  if (s == "relu") return Activation::Relu;
  if (s == "tanh") return Activation::Tanh;
  if (s == "sigmoid") return Activation::Sigmoid;
  if (s == "identity") return Activation::Identity;
  throw FormatError("unknown activation '" + s + "'");
}

DenseLayer make_layer(std::size_t in, std::size_t out, Activation act, Rng& rng) {
  if (in == 0 || out == 0) throw ConfigError("layer dimensions must be positive");
  DenseLayer l;
  l.activation = act;
  l.weights.resize(static_cast<Eigen::Index>(out), static_cast<Eigen::Index>(in));
  const double limit = std::sqrt(6.0 / static_cast<double>(in));
  for (Eigen::Index i = 0; i < l.weights.size(); ++i) l.weights.data()[i] = rng.uniform(-limit, limit);
  l.bias = Vector::Zero(static_cast<Eigen::Index>(out));
  return l;
}

void validate(std::span<const DenseLayer> layers) {
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (layers[i].bias.size() != layers[i].weights.rows())
      throw ShapeError("layer " + std::to_string(i) + ": bias length " + std::to_string(layers[i].bias.size()) +
                       " does not match " + shape(layers[i].weights.rows(), layers[i].weights.cols()) + " weights");
    if (i > 0 && layers[i].in() != layers[i - 1].out())
      throw ShapeError("layer " + std::to_string(i) + " expects " + std::to_string(layers[i].in()) +
                       " inputs but the previous layer emits " + std::to_string(layers[i - 1].out()));
  }
}

std::size_t parameter_count(std::span<const DenseLayer> layers) {
  std::size_t n = 0;
  for (const auto& l : layers) n += l.parameter_count();
  return n;
}

ForwardTrace forward(std::span<const DenseLayer> layers, const Matrix& batch) {
  if (layers.empty()) throw ShapeError("network has no layers");
  validate(layers);
  if (static_cast<std::size_t>(batch.cols()) != layers.front().in())
    throw ShapeError("input width " + std::to_string(batch.cols()) + " does not match layer input " +
                     std::to_string(layers.front().in()));
  ForwardTrace t;
  t.inputs.reserve(layers.size());
  t.pre.reserve(layers.size());
  t.post.reserve(layers.size());
  const Matrix* cur = &batch;
  for (const auto& l : layers) {
    t.inputs.push_back(*cur);
    Matrix pre = *cur * l.weights.transpose();
    pre.rowwise() += l.bias.transpose();
    t.post.push_back(activate(pre, l.activation));
    t.pre.push_back(std::move(pre));
    cur = &t.post.back();
  }
  return t;
}

ForwardTrace forward(std::span<const DenseLayer> layers, std::span<const double> input) {
  Matrix row(1, static_cast<Eigen::Index>(input.size()));
  std::copy(input.begin(), input.end(), row.data());
  return forward(layers, row);
}

Vector softmax(std::span<const double> logits) {
  Vector p(static_cast<Eigen::Index>(logits.size()));
  if (logits.empty()) return p;
  const double mx = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) sum += p[static_cast<Eigen::Index>(i)] = std::exp(logits[i] - mx);
  return p / sum;
}

LossResult softmax_cross_entropy(std::span<const double> logits, std::size_t true_class) {
  if (true_class >= logits.size())
    throw IndexError("class " + std::to_string(true_class) + " out of range for " + std::to_string(logits.size()) +
                     " logits");
  const double mx = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double z : logits) sum += std::exp(z - mx);
  LossResult r;
  r.loss = std::log(sum) - (logits[true_class] - mx);
  r.probabilities = softmax(logits);
  return r;
}

Gradients backward(std::span<const DenseLayer> layers, const ForwardTrace& trace, const Matrix& output_grad) {
  if (trace.pre.size() != layers.size() || trace.post.size() != layers.size() || trace.inputs.size() != layers.size())
    throw ShapeError("trace has " + std::to_string(trace.pre.size()) + " layers, network has " +
                     std::to_string(layers.size()));
  if (output_grad.rows() != trace.output().rows() || output_grad.cols() != trace.output().cols())
    throw ShapeError("output gradient is " + shape(output_grad.rows(), output_grad.cols()) + ", expected " +
                     shape(trace.output().rows(), trace.output().cols()));
  Gradients g;
  g.layers.resize(layers.size());
  Matrix grad = output_grad;
  for (std::size_t i = layers.size(); i-- > 0;) {
    const Matrix delta = grad.cwiseProduct(derivative(trace.pre[i], trace.post[i], layers[i].activation));
    g.layers[i].weights = delta.transpose() * trace.inputs[i];
    g.layers[i].bias = delta.colwise().sum().transpose();
    grad = delta * layers[i].weights;
  }
  g.input = std::move(grad);
  return g;
}

void TrainConfig::validate(bool allow_zero_lr) const {
  if (!std::isfinite(learning_rate) || learning_rate < 0.0 || (learning_rate == 0.0 && !allow_zero_lr))
    throw ConfigError("learning rate must be positive");
  if (epochs < 0) throw ConfigError("epochs must be non-negative");
  if (batch_size < 1) throw ConfigError("batch size must be at least 1");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) throw ConfigError("Adam betas must be in [0, 1)");
  if (!(epsilon > 0.0)) throw ConfigError("Adam epsilon must be positive");
}

nlohmann::json TrainConfig::to_json() const {
  return {{"learningRate", learning_rate},
          {"epochs", epochs},
          {"batchSize", batch_size},
          {"seed", seed},
          {"optimizer", optimizer == OptimizerKind::Adam ? "adam" : "sgd"},
          {"beta1", beta1},
          {"beta2", beta2},
          {"epsilon", epsilon}};
}

TrainConfig TrainConfig::from_json(const nlohmann::json& j) {
  TrainConfig c;
  c.learning_rate = j.value("learningRate", c.learning_rate);
  c.epochs = j.value("epochs", c.epochs);
  c.batch_size = j.value("batchSize", c.batch_size);
  c.seed = j.value("seed", c.seed);
  const std::string opt = j.value("optimizer", std::string("adam"));
  if (opt == "adam") c.optimizer = OptimizerKind::Adam;
  else if (opt == "sgd") c.optimizer = OptimizerKind::Sgd;
  else throw ConfigError("unknown optimizer '" + opt + "'");
  c.beta1 = j.value("beta1", c.beta1);
  c.beta2 = j.value("beta2", c.beta2);
  c.epsilon = j.value("epsilon", c.epsilon);
  return c;
}

void Optimizer::step(const std::vector<ParamSlot>& slots) {
  ++t_;
  if (cfg_.optimizer == OptimizerKind::Sgd) {
    for (const auto& s : slots)
      for (std::size_t i = 0; i < s.value.size(); ++i) s.value[i] -= cfg_.learning_rate * s.grad[i];
    return;
  }
  if (m_.size() != slots.size()) {
    m_.assign(slots.size(), {});
    v_.assign(slots.size(), {});
    for (std::size_t k = 0; k < slots.size(); ++k) {
      m_[k].assign(slots[k].value.size(), 0.0);
      v_[k].assign(slots[k].value.size(), 0.0);
    }
  }
  const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (std::size_t k = 0; k < slots.size(); ++k) {
    const auto& s = slots[k];
    if (m_[k].size() != s.value.size()) throw ShapeError("optimizer slot " + std::to_string(k) + " changed size");
    for (std::size_t i = 0; i < s.value.size(); ++i) {
      const double g = s.grad[i];
      m_[k][i] = cfg_.beta1 * m_[k][i] + (1.0 - cfg_.beta1) * g;
      v_[k][i] = cfg_.beta2 * v_[k][i] + (1.0 - cfg_.beta2) * g * g;
      s.value[i] -= cfg_.learning_rate * (m_[k][i] / c1) / (std::sqrt(v_[k][i] / c2) + cfg_.epsilon);
    }
  }
}

std::vector<ParamSlot> param_slots(Network& layers, const Gradients& grads) {
  if (grads.layers.size() != layers.size()) throw ShapeError("gradient and network depth differ");
  std::vector<ParamSlot> slots;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    auto& l = layers[i];
    const auto& g = grads.layers[i];
    slots.push_back({{l.weights.data(), static_cast<std::size_t>(l.weights.size())},
                     {g.weights.data(), static_cast<std::size_t>(g.weights.size())}});
    slots.push_back({{l.bias.data(), static_cast<std::size_t>(l.bias.size())},
                     {g.bias.data(), static_cast<std::size_t>(g.bias.size())}});
  }
  return slots;
}

double train_step(Network& layers, std::span<const Example> batch, Optimizer& opt) {
  if (batch.empty()) return 0.0;
  Matrix x(static_cast<Eigen::Index>(batch.size()), static_cast<Eigen::Index>(layers.front().in()));
  for (std::size_t r = 0; r < batch.size(); ++r) {
    if (static_cast<std::size_t>(batch[r].input.size()) != layers.front().in())
      throw ShapeError("example " + std::to_string(r) + " has width " + std::to_string(batch[r].input.size()));
    x.row(static_cast<Eigen::Index>(r)) = batch[r].input.transpose();
  }
  const ForwardTrace trace = forward(layers, x);
  const Matrix& logits = trace.output();
  Matrix grad(logits.rows(), logits.cols());
  double loss = 0.0;
  const double scale = 1.0 / static_cast<double>(batch.size());
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    const Vector row = logits.row(r).transpose();
    const LossResult lr = softmax_cross_entropy({row.data(), static_cast<std::size_t>(row.size())}, batch[r].label);
    loss += lr.loss;
    Vector g = lr.probabilities;
    g[static_cast<Eigen::Index>(batch[r].label)] -= 1.0;
    grad.row(r) = g.transpose() * scale;
  }
  const Gradients grads = backward(layers, trace, grad);
  opt.step(param_slots(layers, grads));
  return loss * scale;
}

double train_step(Network& layers, std::span<const Example> batch, const TrainConfig& cfg) {
  cfg.validate(true);
  Optimizer opt(cfg);
  return train_step(layers, batch, opt);
}

std::vector<double> train(Network& layers, std::span<const Example> data, const TrainConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  Optimizer opt(cfg);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> losses;
  std::vector<Example> batch;
  for (int e = 0; e < cfg.epochs; ++e) {
    rng.shuffle(order);
    double total = 0.0;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      batch.clear();
      for (std::size_t i = start; i < end; ++i) batch.push_back(data[order[i]]);
      total += train_step(layers, batch, opt) * static_cast<double>(batch.size());
    }
    losses.push_back(data.empty() ? 0.0 : total / static_cast<double>(data.size()));
  }
  return losses;
}

std::size_t predict_class(std::span<const DenseLayer> layers, std::span<const double> input) {
  const ForwardTrace t = forward(layers, input);
  const Matrix& out = t.output();
  std::size_t best = 0;
  for (Eigen::Index i = 1; i < out.cols(); ++i)
    if (out(0, i) > out(0, static_cast<Eigen::Index>(best))) best = static_cast<std::size_t>(i);
  return best;
}

nlohmann::json to_json(const Matrix& m) {
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::vector<double>(m.data(), m.data() + m.size())}};
}

Matrix matrix_from_json(const nlohmann::json& j) {
  try {
    const auto rows = j.at("rows").get<Eigen::Index>();
    const auto cols = j.at("cols").get<Eigen::Index>();
    const auto data = j.at("data").get<std::vector<double>>();
    if (rows < 0 || cols < 0 || static_cast<std::size_t>(rows * cols) != data.size())
      throw FormatError("matrix declares " + shape(rows, cols) + " but holds " + std::to_string(data.size()) + " values");
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (!std::isfinite(data[i])) throw FormatError("matrix holds a non-finite value");
      m.data()[i] = data[i];
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed matrix: ") + e.what());
  }
}

nlohmann::json to_json(const DenseLayer& layer) {
  return {{"weights", to_json(layer.weights)},
          {"bias", std::vector<double>(layer.bias.data(), layer.bias.data() + layer.bias.size())},
          {"activation", to_string(layer.activation)}};
}

DenseLayer layer_from_json(const nlohmann::json& j) {
  try {
    DenseLayer l;
    l.weights = matrix_from_json(j.at("weights"));
    const auto bias = j.at("bias").get<std::vector<double>>();
    l.bias = Eigen::Map<const Vector>(bias.data(), static_cast<Eigen::Index>(bias.size()));
    l.activation = parse_activation(j.at("activation").get<std::string>());
    const DenseLayer one[] = {l};
    validate(one);
    return l;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed layer: ") + e.what());
  } catch (const ShapeError& e) {
    throw FormatError(e.what());
  }
}

nlohmann::json to_json(std::span<const DenseLayer> layers) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& l : layers) arr.push_back(to_json(l));
  return arr;
}

Network network_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw FormatError("network must be a JSON array of layers");
  Network n;
  for (const auto& l : j) n.push_back(layer_from_json(l));
  try {
    validate(n);
  } catch (const ShapeError& e) {
    throw FormatError(e.what());
  }
  return n;
}

GradCheckResult check_gradients(const std::vector<ParamSlot>& slots, const std::function<double()>& loss,
                                const std::function<std::uint64_t()>& pattern, GradCheckOptions opt) {
  GradCheckResult r;
  Rng rng(opt.seed);
  const std::uint64_t base = pattern ? pattern() : 0;
  for (const auto& s : slots) {
    std::vector<std::size_t> idx;
    if (opt.samples_per_slot == 0 || opt.samples_per_slot >= s.value.size()) {
      idx.resize(s.value.size());
      std::iota(idx.begin(), idx.end(), 0);
    } else {
      for (std::size_t k = 0; k < opt.samples_per_slot; ++k) idx.push_back(static_cast<std::size_t>(rng.below(s.value.size())));
    }
    for (std::size_t i : idx) {
      const double saved = s.value[i];
      s.value[i] = saved + opt.step;
      const double up = loss();
      const bool up_same = !pattern || pattern() == base;
      s.value[i] = saved - opt.step;
      const double down = loss();
      const bool down_same = !pattern || pattern() == base;
      s.value[i] = saved;
      if (!up_same || !down_same) {
        ++r.skipped;
        continue;
      }
      const double numeric = (up - down) / (2.0 * opt.step);
      const double analytic = s.grad[i];
      const double denom = std::max({std::abs(analytic), std::abs(numeric), opt.floor});
      r.max_relative_error = std::max(r.max_relative_error, std::abs(analytic - numeric) / denom);
      ++r.checked;
    }
  }
  return r;
}

std::uint64_t relu_pattern(std::span<const DenseLayer> layers, const ForwardTrace& trace, std::uint64_t h) {
  for (std::size_t i = 0; i < layers.size() && i < trace.pre.size(); ++i) {
    if (layers[i].activation != Activation::Relu) continue;
    const Matrix& p = trace.pre[i];
    for (Eigen::Index k = 0; k < p.size(); ++k) {
      h ^= p.data()[k] > 0.0 ? 0x9e37u : 0x79b9u;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

}  // namespace apisift::nn
