#include "apisift/codoc.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <set>
#include <thread>

#include "apisift/error.hpp"
#include "apisift/rng.hpp"

namespace apisift::codoc {

using nn::Matrix;
using nn::Vector;

void ModelConfig::validate() const {
  if (doc_dim != 768) throw ConfigError("doc input must be 768 wide, got " + std::to_string(doc_dim));
  if (code_dim != 384) throw ConfigError("code input must be 384 wide, got " + std::to_string(code_dim));
  if (branch_dim != 128) throw ConfigError("branch outputs must be 128 wide, got " + std::to_string(branch_dim));
  if (num_classes != 3) throw ConfigError("the head must emit 3 classes, got " + std::to_string(num_classes));
  for (const auto* h : {&doc_hidden, &code_hidden, &head_hidden}) {
    if (h->size() != 2) throw ConfigError("each stack has three dense layers (two hidden widths)");
    for (auto w : *h)
      if (w == 0) throw ConfigError("hidden widths must be positive");
  }
}

nlohmann::json ModelConfig::to_json() const {
  return {{"docDim", doc_dim},         {"codeDim", code_dim},       {"branchDim", branch_dim},
          {"numClasses", num_classes}, {"docHidden", doc_hidden},   {"codeHidden", code_hidden},
          {"headHidden", head_hidden}};
}

ModelConfig ModelConfig::from_json(const nlohmann::json& j) {
  ModelConfig c;
  c.doc_dim = j.value("docDim", c.doc_dim);
  c.code_dim = j.value("codeDim", c.code_dim);
  c.branch_dim = j.value("branchDim", c.branch_dim);
  c.num_classes = j.value("numClasses", c.num_classes);
  c.doc_hidden = j.value("docHidden", c.doc_hidden);
  c.code_hidden = j.value("codeHidden", c.code_hidden);
  c.head_hidden = j.value("headHidden", c.head_hidden);
  return c;
}

std::string to_string(InputMode m) {
  switch (m) {
    case InputMode::DocOnly: return "doc-only";
    case InputMode::CodeOnly: return "code-only";
    case InputMode::Both: break;
  }
  return "both";
}

InputMode parse_input_mode(const std::string& s) {
  if (s == "both") return InputMode::Both;
  if (s == "doc-only") return InputMode::DocOnly;
  if (s == "code-only") return InputMode::CodeOnly;
  throw ConfigError("unknown mode '" + s + "' (expected doc-only, code-only or both)");
}

std::size_t CodocModel::parameter_count() const {
  return nn::parameter_count(doc_branch) + nn::parameter_count(code_branch) + nn::parameter_count(head);
}

namespace {

nn::Network stack(std::size_t in, const std::vector<std::size_t>& hidden, std::size_t out, nn::Activation last,
                  Rng& rng) {
  nn::Network net;
  std::size_t prev = in;
  for (auto h : hidden) {
    net.push_back(nn::make_layer(prev, h, nn::Activation::Relu, rng));
    prev = h;
  }
  net.push_back(nn::make_layer(prev, out, last, rng));
  return net;
}

}  // namespace

CodocModel build_model_unchecked(const ModelConfig& cfg, std::uint64_t seed, InputMode mode) {
  Rng rng(seed);
  CodocModel m;
  m.config = cfg;
  m.mode = mode;
  m.doc_branch = stack(cfg.doc_dim, cfg.doc_hidden, cfg.branch_dim, nn::Activation::Relu, rng);
  m.code_branch = stack(cfg.code_dim, cfg.code_hidden, cfg.branch_dim, nn::Activation::Relu, rng);
  m.head = stack(2 * cfg.branch_dim, cfg.head_hidden, cfg.num_classes, nn::Activation::Identity, rng);
  return m;
}

CodocModel build_model(const ModelConfig& cfg, std::uint64_t seed, InputMode mode) {
  cfg.validate();
  return build_model_unchecked(cfg, seed, mode);
}

DualTrace forward(const CodocModel& m, const Matrix& doc, const Matrix& code) {
  if (doc.rows() != code.rows()) throw ShapeError("doc and code batches differ in size");
  DualTrace t;
  t.doc = nn::forward(m.doc_branch, doc);
  t.code = nn::forward(m.code_branch, code);
  Matrix joined(doc.rows(), t.doc.output().cols() + t.code.output().cols());
  joined << t.doc.output(), t.code.output();
  t.head = nn::forward(m.head, joined);
  return t;
}

DualGradients backward(const CodocModel& m, const DualTrace& t, const Matrix& logit_grad) {
  DualGradients g;
  g.head = nn::backward(m.head, t.head, logit_grad);
  const auto doc_w = t.doc.output().cols();
  const auto code_w = t.code.output().cols();
  g.doc = nn::backward(m.doc_branch, t.doc, g.head.input.leftCols(doc_w));
  g.code = nn::backward(m.code_branch, t.code, g.head.input.rightCols(code_w));
  return g;
}

std::vector<nn::ParamSlot> param_slots(CodocModel& m, const DualGradients& g) {
  auto slots = nn::param_slots(m.doc_branch, g.doc);
  for (auto& s : nn::param_slots(m.code_branch, g.code)) slots.push_back(s);
  for (auto& s : nn::param_slots(m.head, g.head)) slots.push_back(s);
  return slots;
}

std::uint64_t relu_pattern(const CodocModel& m, const DualTrace& t) {
  std::uint64_t h = nn::relu_pattern(m.doc_branch, t.doc);
  h = nn::relu_pattern(m.code_branch, t.code, h);
  return nn::relu_pattern(m.head, t.head, h);
}

std::array<std::size_t, kNumLabels> Dataset::class_counts() const {
  std::array<std::size_t, kNumLabels> c{};
  for (const auto& e : examples) ++c[index_of(e.label)];
  return c;
}

std::vector<Label> Dataset::labels() const {
  std::vector<Label> out;
  out.reserve(examples.size());
  for (const auto& e : examples) out.push_back(e.label);
  return out;
}

void Dataset::validate(std::size_t doc_dim, std::size_t code_dim) const {
  std::set<std::string> seen;
  for (const auto& e : examples) {
    if (static_cast<std::size_t>(e.doc.size()) != doc_dim)
      throw FormatError(e.signature + ": doc vector has " + std::to_string(e.doc.size()) + " values, expected " +
                        std::to_string(doc_dim));
    if (static_cast<std::size_t>(e.code.size()) != code_dim)
      throw FormatError(e.signature + ": code vector has " + std::to_string(e.code.size()) + " values, expected " +
                        std::to_string(code_dim));
    if (!e.doc.allFinite() || !e.code.allFinite()) throw FormatError(e.signature + ": non-finite vector value");
    if (!seen.insert(e.signature).second) throw FormatError("duplicate signature " + e.signature);
  }
}

Label argmax_label(std::span<const double> scores) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size() && i < static_cast<std::size_t>(kNumLabels); ++i)
    if (scores[i] > scores[best]) best = i;
  return label_at(static_cast<int>(best));
}

namespace {

// Copies the selected examples into row-major batches, zeroing the input
// the model's mode ablates.
void fill_batch(const CodocModel& m, const Dataset& d, std::span<const std::size_t> idx, Matrix& doc, Matrix& code) {
  doc.resize(static_cast<Eigen::Index>(idx.size()), static_cast<Eigen::Index>(m.config.doc_dim));
  code.resize(static_cast<Eigen::Index>(idx.size()), static_cast<Eigen::Index>(m.config.code_dim));
  for (std::size_t r = 0; r < idx.size(); ++r) {
    const Example& e = d.examples[idx[r]];
    if (static_cast<std::size_t>(e.doc.size()) != m.config.doc_dim ||
        static_cast<std::size_t>(e.code.size()) != m.config.code_dim)
      throw ShapeError(e.signature + ": vector widths do not match the model");
    const auto row = static_cast<Eigen::Index>(r);
    if (m.mode == InputMode::CodeOnly) doc.row(row).setZero();
    else doc.row(row) = e.doc.transpose();
    if (m.mode == InputMode::DocOnly) code.row(row).setZero();
    else code.row(row) = e.code.transpose();
  }
}

Prediction to_prediction(const Matrix& logits, Eigen::Index row) {
  const Vector z = logits.row(row).transpose();
  const Vector p = nn::softmax({z.data(), static_cast<std::size_t>(z.size())});
  Prediction out;
  for (int k = 0; k < kNumLabels; ++k) out.probs[k] = p[k];
  // Argmax on logits: softmax is monotone and this keeps exact ties exact.
  out.label = argmax_label({z.data(), static_cast<std::size_t>(z.size())});
  return out;
}

}  // namespace

Prediction predict(const CodocModel& m, std::span<const double> doc, std::span<const double> code) {
  if (doc.size() != m.config.doc_dim)
    throw ShapeError("doc vector has " + std::to_string(doc.size()) + " values, model expects " +
                     std::to_string(m.config.doc_dim));
  if (code.size() != m.config.code_dim)
    throw ShapeError("code vector has " + std::to_string(code.size()) + " values, model expects " +
                     std::to_string(m.config.code_dim));
  Matrix dm = Matrix::Zero(1, static_cast<Eigen::Index>(doc.size()));
  Matrix cm = Matrix::Zero(1, static_cast<Eigen::Index>(code.size()));
  if (m.mode != InputMode::CodeOnly) std::copy(doc.begin(), doc.end(), dm.data());
  if (m.mode != InputMode::DocOnly) std::copy(code.begin(), code.end(), cm.data());
  return to_prediction(forward(m, dm, cm).head.output(), 0);
}

std::vector<Prediction> predict(const CodocModel& m, const Dataset& d, std::span<const std::size_t> indices) {
  std::vector<Prediction> out;
  constexpr std::size_t kChunk = 256;
  Matrix doc, code;
  for (std::size_t start = 0; start < indices.size(); start += kChunk) {
    const auto part = indices.subspan(start, std::min(kChunk, indices.size() - start));
    fill_batch(m, d, part, doc, code);
    const Matrix logits = forward(m, doc, code).head.output();
    for (Eigen::Index r = 0; r < logits.rows(); ++r) out.push_back(to_prediction(logits, r));
  }
  return out;
}

std::array<double, kNumLabels> inverse_frequency_weights(std::span<const Label> labels) {
  std::array<std::size_t, kNumLabels> counts{};
  for (Label l : labels) ++counts[index_of(l)];
  std::array<double, kNumLabels> w{};
  for (std::size_t c = 0; c < kNumLabels; ++c)
    w[c] = counts[c] == 0 ? 1.0
                          : static_cast<double>(labels.size()) / (static_cast<double>(kNumLabels) * counts[c]);
  return w;
}

std::vector<double> train_model(CodocModel& m, const Dataset& d, std::span<const std::size_t> indices,
                                const TrainOptions& opt) {
  opt.train.validate();
  if (opt.class_weights)
    for (double w : *opt.class_weights)
      if (!(w >= 0.0) || !std::isfinite(w)) throw ConfigError("class weights must be finite and non-negative");
  Rng rng(opt.train.seed);
  nn::Optimizer optimizer(opt.train);
  std::vector<std::size_t> order(indices.begin(), indices.end());
  std::vector<double> losses;
  Matrix doc, code;
  const auto bs = static_cast<std::size_t>(opt.train.batch_size);
  for (int epoch = 0; epoch < opt.train.epochs; ++epoch) {
    rng.shuffle(order);
    double total = 0.0;
    for (std::size_t start = 0; start < order.size(); start += bs) {
      const std::span<const std::size_t> part(order.data() + start, std::min(bs, order.size() - start));
      fill_batch(m, d, part, doc, code);
      const DualTrace t = forward(m, doc, code);
      const Matrix& logits = t.head.output();
      Matrix grad(logits.rows(), logits.cols());
      const double scale = 1.0 / static_cast<double>(part.size());
      for (Eigen::Index r = 0; r < logits.rows(); ++r) {
        const Label y = d.examples[part[static_cast<std::size_t>(r)]].label;
        const double w = opt.class_weights ? (*opt.class_weights)[index_of(y)] : 1.0;
        const Vector z = logits.row(r).transpose();
        const auto lr = nn::softmax_cross_entropy({z.data(), static_cast<std::size_t>(z.size())},
                                                  static_cast<std::size_t>(index_of(y)));
        total += w * lr.loss;
        Vector g = lr.probabilities;
        g[index_of(y)] -= 1.0;
        grad.row(r) = (w * scale) * g.transpose();
      }
      optimizer.step(param_slots(m, backward(m, t, grad)));
    }
    losses.push_back(order.empty() ? 0.0 : total / static_cast<double>(order.size()));
  }
  return losses;
}

std::vector<std::size_t> FoldPlan::test_indices(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i)
    if (fold_of[i] == fold) out.push_back(i);
  return out;
}

std::vector<std::size_t> FoldPlan::train_indices(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i)
    if (fold_of[i] != fold) out.push_back(i);
  return out;
}

std::map<std::string, std::size_t> FoldPlan::assignment(const Dataset& d) const {
  std::map<std::string, std::size_t> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i) out.emplace(d.examples.at(i).signature, fold_of[i]);
  return out;
}

FoldPlan stratified_kfold(std::span<const Label> labels, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw ConfigError("k must be at least 2");
  std::array<std::vector<std::size_t>, kNumLabels> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[index_of(labels[i])].push_back(i);
  for (int c = 0; c < kNumLabels; ++c)
    if (by_class[c].size() < k)
      throw ConfigError("class " + std::string(to_string(label_at(c))) + " has " + std::to_string(by_class[c].size()) +
                        " examples, fewer than k = " + std::to_string(k));
  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.fold_of.assign(labels.size(), 0);
  Rng rng(seed);
  std::size_t next = 0;
  for (auto& members : by_class) {
    rng.shuffle(members);
    for (std::size_t i : members) {
      plan.fold_of[i] = next;
      next = (next + 1) % k;
    }
  }
  return plan;
}

nlohmann::json CrossvalConfig::to_json() const {
  nlohmann::json j = {{"k", k},
                      {"seed", seed},
                      {"model", model.to_json()},
                      {"train", options.train.to_json()},
                      {"mode", codoc::to_string(mode)},
                      {"binaryTarget", binary_target ? nlohmann::json(std::string(apisift::to_string(*binary_target)))
                                                     : nlohmann::json(nullptr)}};
  if (options.class_weights) j["classWeights"] = *options.class_weights;
  return j;
}

nlohmann::json Summary::to_json() const {
  return {{"A", accuracy}, {"P", precision}, {"R", recall}, {"F", f1}, {"K", kappa}};
}

nlohmann::json CrossvalReport::to_json() const {
  nlohmann::json folds_j = nlohmann::json::array();
  for (const auto& f : folds)
    folds_j.push_back({{"fold", f.fold}, {"trainSize", f.train_size}, {"testSize", f.test_size},
                       {"metrics", f.metrics.to_json()}});
  nlohmann::json cm = nlohmann::json::array();
  for (const auto& row : pooled.counts) cm.push_back(row);
  return {{"config", config.to_json()}, {"folds", folds_j}, {"confusion", cm}, {"aggregate", aggregate.to_json()},
          {"summary", summary.to_json()}};
}

namespace {

Summary summarize(const eval::MetricsReport& r, std::optional<Label> target) {
  Summary s;
  s.accuracy = r.accuracy;
  s.kappa = r.kappa ? r.kappa->kappa : 0.0;
  if (target) {
    const auto& c = r.per_class[index_of(*target)];
    s.precision = c.precision;
    s.recall = c.recall;
    s.f1 = c.f1;
  } else {
    s.precision = r.weighted_precision;
    s.recall = r.weighted_recall;
    s.f1 = r.weighted_f1;
  }
  return s;
}

}  // namespace

CrossvalReport run_crossval(const Dataset& input, const CrossvalConfig& cfg) {
  if (!cfg.unchecked_model) cfg.model.validate();
  cfg.options.train.validate();
  input.validate(cfg.model.doc_dim, cfg.model.code_dim);
  const FoldPlan plan = stratified_kfold(input.labels(), cfg.k, cfg.seed);

  Dataset d = input;
  if (cfg.binary_target)
    for (auto& e : d.examples)
      if (e.label != *cfg.binary_target) e.label = Label::Neither;

  CrossvalReport report;
  report.config = cfg;
  report.folds.resize(cfg.k);
  report.predictions.resize(d.examples.size());
  report.truth = d.labels();

  auto run_fold = [&](std::size_t fold) {
    const std::uint64_t fold_seed = mix_seed(cfg.seed ^ mix_seed(fold + 1));
    CodocModel m = cfg.unchecked_model ? build_model_unchecked(cfg.model, fold_seed, cfg.mode)
                                       : build_model(cfg.model, fold_seed, cfg.mode);
    TrainOptions opt = cfg.options;
    opt.train.seed = mix_seed(fold_seed);
    const auto train_idx = plan.train_indices(fold);
    const auto test_idx = plan.test_indices(fold);
    train_model(m, d, train_idx, opt);
    const auto preds = predict(m, d, test_idx);
    FoldResult& fr = report.folds[fold];
    fr.fold = fold;
    fr.train_size = train_idx.size();
    fr.test_size = test_idx.size();
    for (std::size_t i = 0; i < test_idx.size(); ++i) {
      report.predictions[test_idx[i]] = preds[i];
      fr.confusion.add(d.examples[test_idx[i]].label, preds[i].label);
    }
    fr.metrics = eval::metrics(fr.confusion);
  };

  if (cfg.parallel) {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    std::vector<std::exception_ptr> errors(cfg.k);
    const std::size_t n = std::max<std::size_t>(1, std::min<std::size_t>(cfg.k, std::thread::hardware_concurrency()));
    for (std::size_t w = 0; w < n; ++w)
      workers.emplace_back([&] {
        for (std::size_t f; (f = next++) < cfg.k;) {
          try {
            run_fold(f);
          } catch (...) {
            errors[f] = std::current_exception();
          }
        }
      });
    for (auto& t : workers) t.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  } else {
    for (std::size_t f = 0; f < cfg.k; ++f) run_fold(f);
  }

  for (const auto& f : report.folds)
    for (int i = 0; i < kNumLabels; ++i)
      for (int j = 0; j < kNumLabels; ++j) report.pooled.counts[i][j] += f.confusion.counts[i][j];
  report.aggregate = eval::metrics(report.pooled);
  report.summary = summarize(report.aggregate, cfg.binary_target);
  return report;
}

CrossvalReport run_ablation(const Dataset& d, InputMode mode, const CrossvalConfig& cfg) {
  CrossvalConfig c = cfg;
  c.mode = mode;
  return run_crossval(d, c);
}

nlohmann::json Complementarity::to_json() const {
  return {{"onlyA", only_a}, {"onlyB", only_b}, {"both", both}, {"neither", neither}};
}

Complementarity complementarity(std::span<const Label> a, std::span<const Label> b, std::span<const Label> truth,
                                Label target) {
  if (a.size() != truth.size() || b.size() != truth.size())
    throw LengthMismatch("prediction lists of " + std::to_string(a.size()) + " and " + std::to_string(b.size()) +
                         " for " + std::to_string(truth.size()) + " examples");
  Complementarity c;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] != target) continue;
    const bool ra = a[i] == target, rb = b[i] == target;
    if (ra && rb) ++c.both;
    else if (ra) ++c.only_a;
    else if (rb) ++c.only_b;
    else ++c.neither;
  }
  return c;
}

Dataset make_synthetic(const SyntheticConfig& cfg) {
  Rng rng(cfg.seed);
  auto direction = [&](std::size_t dim) {
    Vector v(static_cast<Eigen::Index>(dim));
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = rng.normal();
    return Vector(v / v.norm());
  };
  std::array<Vector, kNumLabels> doc_mean, code_mean;
  for (int c = 0; c < kNumLabels; ++c) {
    doc_mean[c] = direction(cfg.doc_dim) * cfg.doc_separation;
    code_mean[c] = direction(cfg.code_dim) * cfg.code_separation;
  }
  auto sample = [&](const Vector& mean) {
    Vector v(mean.size());
    const double sd = cfg.noise / std::sqrt(static_cast<double>(mean.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = mean[i] + sd * rng.normal();
    return v;
  };
  Dataset d;
  std::size_t id = 0;
  // Interleave classes so that example order carries no label information.
  std::array<std::size_t, kNumLabels> left = cfg.per_class;
  while (left[0] + left[1] + left[2] > 0) {
    for (int c = 0; c < kNumLabels; ++c) {
      if (left[c] == 0) continue;
      --left[c];
      Example e;
      e.signature = "synthetic.Api#m" + std::to_string(id++) + "():void";
      e.label = label_at(c);
      e.doc = sample(doc_mean[c]);
      const double n = e.doc.norm();
      if (n > 0) e.doc /= n;
      e.code = sample(code_mean[c]);
      d.examples.push_back(std::move(e));
    }
  }
  return d;
}

nlohmann::json to_json(const CodocModel& m) {
  return {{"schemaVersion", kModelSchemaVersion},
          {"config", m.config.to_json()},
          {"mode", to_string(m.mode)},
          {"docBranch", nn::to_json(m.doc_branch)},
          {"codeBranch", nn::to_json(m.code_branch)},
          {"head", nn::to_json(m.head)}};
}

CodocModel model_from_json(const nlohmann::json& j) {
  try {
    if (j.at("schemaVersion").get<int>() != kModelSchemaVersion)
      throw FormatError("unsupported model schema version " + j.at("schemaVersion").dump());
    CodocModel m;
    m.config = ModelConfig::from_json(j.at("config"));
    m.mode = parse_input_mode(j.at("mode").get<std::string>());
    m.doc_branch = nn::network_from_json(j.at("docBranch"));
    m.code_branch = nn::network_from_json(j.at("codeBranch"));
    m.head = nn::network_from_json(j.at("head"));
    const bool ok = !m.doc_branch.empty() && !m.code_branch.empty() && !m.head.empty() &&
                    m.doc_branch.front().in() == m.config.doc_dim && m.code_branch.front().in() == m.config.code_dim &&
                    m.head.front().in() == m.doc_branch.back().out() + m.code_branch.back().out() &&
                    m.head.back().out() == m.config.num_classes;
    if (!ok) throw FormatError("model layers do not match its config");
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed model: ") + e.what());
  } catch (const ConfigError& e) {
    throw FormatError(e.what());
  }
}

}  // namespace apisift::codoc
