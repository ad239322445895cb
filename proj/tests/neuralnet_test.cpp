#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "apisift/error.hpp"
#include "apisift/neuralnet.hpp"
#include "support/hp.hpp"

using namespace apisift;
using namespace apisift::nn;

namespace {

Network random_net(Rng& rng, std::vector<std::size_t> dims, Activation hidden = Activation::Relu) {
  Network n;
  for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
    n.push_back(make_layer(dims[i], dims[i + 1], i + 2 == dims.size() ? Activation::Identity : hidden, rng));
    for (Eigen::Index k = 0; k < n.back().bias.size(); ++k) n.back().bias[k] = rng.uniform(-0.5, 0.5);
  }
  return n;
}

std::vector<double> random_vec(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(-1, 1);
  return v;
}

// Plain-loop forward pass used as a reference.
std::vector<double> scripted_forward(const Network& net, std::vector<double> x) {
  for (const auto& l : net) {
    std::vector<double> y(l.out());
    for (std::size_t o = 0; o < l.out(); ++o) {
      double s = l.bias[static_cast<Eigen::Index>(o)];
      for (std::size_t i = 0; i < l.in(); ++i) s += l.weights(static_cast<Eigen::Index>(o), static_cast<Eigen::Index>(i)) * x[i];
      switch (l.activation) {
        case Activation::Relu: s = s > 0 ? s : 0; break;
        case Activation::Tanh: s = std::tanh(s); break;
        case Activation::Sigmoid: s = 1 / (1 + std::exp(-s)); break;
        case Activation::Identity: break;
      }
      y[o] = s;
    }
    x = std::move(y);
  }
  return x;
}

double batch_loss(const Network& net, const std::vector<Example>& batch) {
  double total = 0;
  for (const auto& e : batch) {
    const auto t = forward(net, std::span<const double>(e.input.data(), e.input.size()));
    const Vector row = t.output().row(0).transpose();
    total += softmax_cross_entropy({row.data(), static_cast<std::size_t>(row.size())}, e.label).loss;
  }
  return total;
}

std::vector<Example> random_batch(Rng& rng, std::size_t n, std::size_t in, std::size_t classes) {
  std::vector<Example> out;
  for (std::size_t i = 0; i < n; ++i) {
    const auto v = random_vec(rng, in);
    out.push_back({Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(in)), rng.below(classes)});
  }
  return out;
}

Matrix stack(const std::vector<Example>& batch) {
  Matrix x(static_cast<Eigen::Index>(batch.size()), batch.front().input.size());
  for (std::size_t r = 0; r < batch.size(); ++r) x.row(static_cast<Eigen::Index>(r)) = batch[r].input.transpose();
  return x;
}

Matrix loss_gradient(const Matrix& logits, const std::vector<Example>& batch) {
  Matrix g(logits.rows(), logits.cols());
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    const Vector row = logits.row(r).transpose();
    Vector p = softmax({row.data(), static_cast<std::size_t>(row.size())});
    p[static_cast<Eigen::Index>(batch[static_cast<std::size_t>(r)].label)] -= 1;
    g.row(r) = p.transpose();
  }
  return g;
}

}  // namespace

TEST(Forward, ZeroNetworkGivesZeroOutput) {
  DenseLayer l{Matrix::Zero(3, 4), Vector::Zero(3), Activation::Relu};
  const Network net{l};
  const double x[] = {1, -2, 3, 4};
  EXPECT_TRUE(forward(net, x).output().isZero());
}

TEST(Forward, IdentityLayer) {
  DenseLayer l{Matrix::Identity(2, 2), Vector::Zero(2), Activation::Identity};
  const Network net{l};
  const double x[] = {1, 2};
  const auto out = forward(net, x).output();
  EXPECT_EQ(out(0, 0), 1.0);
  EXPECT_EQ(out(0, 1), 2.0);
}

TEST(Forward, MatchesScriptedMatrixMath) {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const Activation acts[] = {Activation::Relu, Activation::Tanh, Activation::Sigmoid};
    const Network net = random_net(rng, {7, 5, 4, 3}, acts[trial % 3]);
    const auto x = random_vec(rng, 7);
    const auto ref = scripted_forward(net, x);
    const auto out = forward(net, x).output();
    for (std::size_t i = 0; i < ref.size(); ++i) EXPECT_NEAR(out(0, static_cast<Eigen::Index>(i)), ref[i], 1e-6);
  }
}

TEST(Forward, ShapeErrors) {
  Rng rng(1);
  Network net = random_net(rng, {4, 3, 2});
  const double bad[] = {1, 2, 3};
  EXPECT_THROW(forward(net, bad), ShapeError);
  net[1].weights = Matrix::Zero(2, 5);
  const double ok[] = {1, 2, 3, 4};
  EXPECT_THROW(forward(net, ok), ShapeError);
}

TEST(SoftmaxCrossEntropy, EqualLogits) {
  const double z[] = {0.3, 0.3, 0.3};
  const auto r = softmax_cross_entropy(z, 1);
  EXPECT_NEAR(r.loss, std::log(3.0), 1e-12);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(r.probabilities[i], 1.0 / 3, 1e-15);
}

TEST(SoftmaxCrossEntropy, ConfidentCorrect) {
  const double z[] = {10, -10, -10};
  EXPECT_LT(softmax_cross_entropy(z, 0).loss, 1e-4);
}

TEST(SoftmaxCrossEntropy, StableForHugeLogits) {
  const double z[] = {1e308, -1e308, 0};
  const auto r = softmax_cross_entropy(z, 0);
  EXPECT_TRUE(std::isfinite(r.loss));
  EXPECT_NEAR(r.probabilities.sum(), 1.0, 1e-12);
}

TEST(SoftmaxCrossEntropy, OutOfRangeClass) {
  const double z[] = {1, 2, 3};
  EXPECT_THROW(softmax_cross_entropy(z, 3), IndexError);
}

TEST(SoftmaxCrossEntropy, MatchesHighPrecisionOracle) {
  Rng rng(17);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + rng.below(8);
    std::vector<double> z(n);
    for (auto& v : z) v = rng.uniform(-30, 30);
    const std::size_t cls = rng.below(n);
    oracle::HP sum = 0;
    for (double v : z) sum += exp(oracle::HP(v));
    const oracle::HP loss = log(sum) - oracle::HP(z[cls]);
    const auto r = softmax_cross_entropy(z, cls);
    EXPECT_NEAR(r.loss, loss.convert_to<double>(), 1e-9);
    double total = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double p = (exp(oracle::HP(z[i])) / sum).convert_to<double>();
      EXPECT_NEAR(r.probabilities[static_cast<Eigen::Index>(i)], p, 1e-9);
      total += r.probabilities[static_cast<Eigen::Index>(i)];
    }
    EXPECT_NEAR(total, 1.0, 1e-9);
  }
}

TEST(Backward, SquaredErrorClosedForm) {
  Rng rng(2);
  DenseLayer l = make_layer(3, 2, Activation::Identity, rng);
  const Network net{l};
  const double x[] = {0.5, -1.0, 2.0};
  const double t[] = {1.0, -1.0};
  const auto trace = forward(net, x);
  Matrix g = 2.0 * (trace.output() - Eigen::Map<const Matrix>(t, 1, 2));
  const auto grads = backward(net, trace, g);
  for (int o = 0; o < 2; ++o) {
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(grads.layers[0].weights(o, i), g(0, o) * x[i], 1e-15);
    EXPECT_NEAR(grads.layers[0].bias[o], g(0, o), 1e-15);
  }
}

TEST(Backward, ZeroLossGradientGivesZeroGradients) {
  Rng rng(4);
  const Network net = random_net(rng, {5, 4, 3});
  const auto x = random_vec(rng, 5);
  const auto trace = forward(net, x);
  const auto grads = backward(net, trace, Matrix::Zero(1, 3));
  for (const auto& g : grads.layers) {
    EXPECT_TRUE(g.weights.isZero());
    EXPECT_TRUE(g.bias.isZero());
  }
  EXPECT_TRUE(grads.input.isZero());
}

TEST(Backward, ShapeMismatch) {
  Rng rng(4);
  const Network net = random_net(rng, {5, 4, 3});
  const auto trace = forward(net, random_vec(rng, 5));
  EXPECT_THROW(backward(net, trace, Matrix::Zero(1, 2)), ShapeError);
  const Network shorter(net.begin(), net.begin() + 1);
  EXPECT_THROW(backward(shorter, trace, Matrix::Zero(1, 3)), ShapeError);
}

TEST(Backward, MatchesFiniteDifferences) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const Activation acts[] = {Activation::Relu, Activation::Tanh, Activation::Sigmoid};
    Network net = random_net(rng, {6, 5, 4, 3}, acts[seed % 3]);
    const auto batch = random_batch(rng, 4, 6, 3);
    const auto trace = forward(net, stack(batch));
    const auto grads = backward(net, trace, loss_gradient(trace.output(), batch));
    const auto res = check_gradients(
        param_slots(net, grads), [&] { return batch_loss(net, batch); },
        [&] { return relu_pattern(net, forward(net, stack(batch))); });
    EXPECT_LE(res.max_relative_error, 1e-4) << "seed " << seed;
    EXPECT_GT(res.checked, res.skipped);
  }
}

TEST(Backward, InputGradientMatchesFiniteDifferences) {
  Rng rng(8);
  const Network net = random_net(rng, {4, 6, 3}, Activation::Tanh);
  auto batch = random_batch(rng, 1, 4, 3);
  const auto trace = forward(net, stack(batch));
  const auto grads = backward(net, trace, loss_gradient(trace.output(), batch));
  for (Eigen::Index i = 0; i < 4; ++i) {
    const double saved = batch[0].input[i];
    batch[0].input[i] = saved + 1e-6;
    const double up = batch_loss(net, batch);
    batch[0].input[i] = saved - 1e-6;
    const double down = batch_loss(net, batch);
    batch[0].input[i] = saved;
    EXPECT_NEAR(grads.input(0, i), (up - down) / 2e-6, 1e-7);
  }
}

TEST(TrainConfig, Validation) {
  TrainConfig c;
  EXPECT_NO_THROW(c.validate());
  c.learning_rate = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  EXPECT_NO_THROW(c.validate(true));
  c.learning_rate = -1;
  EXPECT_THROW(c.validate(true), ConfigError);
  c = {};
  c.epochs = -1;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.batch_size = 0;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(TrainConfig, JsonRoundTrip) {
  TrainConfig c;
  c.learning_rate = 0.0123;
  c.seed = 99;
  c.optimizer = OptimizerKind::Sgd;
  const auto back = TrainConfig::from_json(c.to_json());
  EXPECT_EQ(back.to_json(), c.to_json());
}

TEST(TrainStep, ZeroLearningRateLeavesParametersUnchanged) {
  for (auto kind : {OptimizerKind::Sgd, OptimizerKind::Adam}) {
    Rng rng(6);
    Network net = random_net(rng, {4, 5, 3});
    const Network before = net;
    TrainConfig cfg;
    cfg.learning_rate = 0;
    cfg.optimizer = kind;
    train_step(net, random_batch(rng, 8, 4, 3), cfg);
    for (std::size_t i = 0; i < net.size(); ++i) {
      EXPECT_EQ(net[i].weights, before[i].weights);
      EXPECT_EQ(net[i].bias, before[i].bias);
    }
  }
}

TEST(TrainStep, InvalidConfigRejected) {
  Rng rng(6);
  Network net = random_net(rng, {4, 3});
  TrainConfig cfg;
  cfg.batch_size = 0;
  EXPECT_THROW(train_step(net, random_batch(rng, 2, 4, 3), cfg), ConfigError);
}

TEST(Train, SeparableBlobs) {
  Rng rng(12);
  std::vector<Example> data;
  for (int i = 0; i < 200; ++i) {
    const std::size_t cls = static_cast<std::size_t>(i % 2);
    Vector x(2);
    x << (cls ? 2.0 : -2.0) + rng.normal() * 0.5, rng.normal();
    data.push_back({x, cls});
  }
  Rng init(1);
  Network net = random_net(init, {2, 8, 2});
  TrainConfig cfg;
  cfg.learning_rate = 0.05;
  cfg.batch_size = 200;
  cfg.epochs = 200;
  cfg.optimizer = OptimizerKind::Sgd;
  train(net, data, cfg);
  int correct = 0;
  for (const auto& e : data) correct += predict_class(net, {e.input.data(), 2}) == e.label;
  EXPECT_GE(correct / 200.0, 0.98);
}

TEST(Train, SameSeedIsBitwiseIdentical) {
  auto run = [] {
    Rng rng(21);
    Network net = random_net(rng, {5, 6, 3});
    const auto data = random_batch(rng, 50, 5, 3);
    TrainConfig cfg;
    cfg.epochs = 5;
    cfg.batch_size = 7;
    cfg.seed = 77;
    train(net, data, cfg);
    return to_json(net).dump();
  };
  EXPECT_EQ(run(), run());
}

TEST(Train, ZeroEpochsKeepInitialization) {
  Rng rng(21);
  Network net = random_net(rng, {5, 3});
  const Network before = net;
  TrainConfig cfg;
  cfg.epochs = 0;
  EXPECT_TRUE(train(net, random_batch(rng, 10, 5, 3), cfg).empty());
  EXPECT_EQ(net[0].weights, before[0].weights);
}

TEST(Train, FullBatchDescentIsMonotone) {
  Rng rng(31);
  Network net = random_net(rng, {6, 8, 3});
  const auto data = random_batch(rng, 40, 6, 3);
  TrainConfig cfg;
  cfg.learning_rate = 1e-4;
  cfg.optimizer = OptimizerKind::Sgd;
  Optimizer opt(cfg);
  double prev = batch_loss(net, data);
  for (int step = 0; step < 20; ++step) {
    train_step(net, data, opt);
    const double cur = batch_loss(net, data);
    EXPECT_LE(cur, prev + 1e-12);
    prev = cur;
  }
}

TEST(Checkpoint, JsonRoundTripIsExact) {
  Rng rng(9);
  const Network net = random_net(rng, {4, 3, 2}, Activation::Tanh);
  const auto back = network_from_json(nlohmann::json::parse(to_json(net).dump()));
  ASSERT_EQ(back.size(), net.size());
  for (std::size_t i = 0; i < net.size(); ++i) {
    EXPECT_EQ(back[i].weights, net[i].weights);
    EXPECT_EQ(back[i].bias, net[i].bias);
    EXPECT_EQ(back[i].activation, net[i].activation);
  }
}

TEST(Checkpoint, MalformedMatrixRejected) {
  EXPECT_THROW(matrix_from_json({{"rows", 2}, {"cols", 2}, {"data", {1, 2, 3}}}), FormatError);
  EXPECT_THROW(matrix_from_json({{"rows", 2}}), FormatError);
}

TEST(Init, HeUniformBoundsAndDeterminism) {
  Rng a(5), b(5);
  const auto la = make_layer(50, 20, Activation::Relu, a);
  const auto lb = make_layer(50, 20, Activation::Relu, b);
  EXPECT_EQ(la.weights, lb.weights);
  EXPECT_LE(la.weights.cwiseAbs().maxCoeff(), std::sqrt(6.0 / 50));
  EXPECT_TRUE(la.bias.isZero());
}
