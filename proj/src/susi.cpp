#include "apisift/susi.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>

#include "apisift/error.hpp"
#include "apisift/rng.hpp"

namespace apisift::susi {

namespace {

constexpr std::array<std::string_view, 8> kPrimitives{"boolean", "byte", "char", "short",
                                                      "int",     "long", "float", "double"};
constexpr std::array<std::string_view, 5> kTypeClassNames{"void", "primitive", "string", "array", "object"};

std::string strip_generics(std::string_view t) {
  std::string out;
  int depth = 0;
  for (char c : t) {
    if (c == '<') ++depth;
    else if (c == '>') --depth;
    else if (depth == 0 && !std::isspace(static_cast<unsigned char>(c))) out += c;
  }
  return out;
}

bool is_primitive(std::string_view t) { return std::ranges::find(kPrimitives, t) != kPrimitives.end(); }

std::string element_type(std::string t) {
  while (t.ends_with("[]")) t.resize(t.size() - 2);
  if (t.ends_with("...")) t.resize(t.size() - 3);
  return t;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

double softplus(double s) { return std::max(s, 0.0) + std::log1p(std::exp(-std::abs(s))); }
double sigmoid(double s) { return s >= 0 ? 1.0 / (1.0 + std::exp(-s)) : std::exp(s) / (1.0 + std::exp(s)); }

std::vector<std::string> string_list(const nlohmann::json& j) { return j.get<std::vector<std::string>>(); }

}  // namespace

std::size_t FeatureSpec::width() const {
  return name_prefixes.size() + kTypeClassNames.size() + 4 + 3 + 3 + class_keywords.size();
}

std::vector<std::string> FeatureSpec::feature_names() const {
  std::vector<std::string> out;
  for (const auto& p : name_prefixes) out.push_back("prefix:" + p);
  for (auto t : kTypeClassNames) out.push_back("return:" + std::string(t));
  for (auto b : {"0", "1", "2", "3+"}) out.push_back(std::string("params:") + b);
  for (auto t : {"string", "object", "primitive-array"}) out.push_back(std::string("param-type:") + t);
  for (auto m : {"static", "final", "native"}) out.push_back(std::string("modifier:") + m);
  for (const auto& k : class_keywords) out.push_back("class:" + k);
  return out;
}

nlohmann::json FeatureSpec::to_json() const {
  return {{"version", version}, {"namePrefixes", name_prefixes}, {"classKeywords", class_keywords}};
}

FeatureSpec FeatureSpec::from_json(const nlohmann::json& j) {
  try {
    FeatureSpec s;
    s.version = j.at("version").get<std::string>();
    s.name_prefixes = string_list(j.at("namePrefixes"));
    s.class_keywords = string_list(j.at("classKeywords"));
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("feature spec: ") + e.what());
  }
}

TypeClass classify_type(std::string_view type) {
  const std::string t = strip_generics(type);
  if (t == "void") return TypeClass::Void;
  if (t.ends_with("[]") || t.ends_with("...")) return TypeClass::Array;
  if (is_primitive(t)) return TypeClass::Primitive;
  if (t == "String" || t == "java.lang.String") return TypeClass::String;
  return TypeClass::Object;
}

bool has_name_prefix(std::string_view name, std::string_view prefix) {
  if (!name.starts_with(prefix)) return false;
  if (name.size() == prefix.size()) return true;
  const unsigned char next = static_cast<unsigned char>(name[prefix.size()]);
  return std::isupper(next) || std::isdigit(next) || next == '_';
}

std::vector<double> extract_features(const MethodRecord& r, const FeatureSpec& spec) {
  std::vector<double> f;
  f.reserve(spec.width());
  for (const auto& p : spec.name_prefixes) f.push_back(has_name_prefix(r.name, p) ? 1.0 : 0.0);

  const auto ret = classify_type(r.return_type);
  for (std::size_t i = 0; i < kTypeClassNames.size(); ++i) f.push_back(static_cast<std::size_t>(ret) == i ? 1.0 : 0.0);

  const std::size_t bucket = std::min<std::size_t>(r.params.size(), 3);
  for (std::size_t b = 0; b < 4; ++b) f.push_back(bucket == b ? 1.0 : 0.0);

  bool any_string = false, any_object = false, any_prim_array = false;
  for (const auto& p : r.params) {
    const auto c = classify_type(p);
    any_string |= c == TypeClass::String;
    any_object |= c == TypeClass::Object;
    any_prim_array |= c == TypeClass::Array && is_primitive(element_type(strip_generics(p)));
  }
  for (bool b : {any_string, any_object, any_prim_array}) f.push_back(b ? 1.0 : 0.0);

  for (auto m : {Modifier::Static, Modifier::Final, Modifier::Native}) f.push_back(r.modifiers.contains(m) ? 1.0 : 0.0);

  const std::string cls = lower(r.fqcn);
  for (const auto& k : spec.class_keywords) f.push_back(cls.find(lower(k)) != std::string::npos ? 1.0 : 0.0);
  return f;
}

nn::TrainConfig BaselineConfig::default_train() {
  nn::TrainConfig t;
  t.learning_rate = 0.05;
  t.epochs = 60;
  t.batch_size = 32;
  return t;
}

void BaselineConfig::validate(bool allow_zero_lr) const {
  train.validate(allow_zero_lr);
  if (!(l2 >= 0.0) || !std::isfinite(l2)) throw ConfigError("l2 must be a finite non-negative number");
}

nlohmann::json BaselineConfig::to_json() const { return {{"train", train.to_json()}, {"l2", l2}}; }

BaselineConfig BaselineConfig::from_json(const nlohmann::json& j) {
  BaselineConfig c;
  try {
    if (j.contains("train")) c.train = nn::TrainConfig::from_json(j.at("train"));
    if (j.contains("l2")) c.l2 = j.at("l2").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("baseline config: ") + e.what());
  }
  c.validate(true);
  return c;
}

BaselineModel zero_model(const FeatureSpec& spec) {
  BaselineModel m;
  m.spec = spec;
  m.weights = nn::Matrix::Zero(kNumLabels, static_cast<Eigen::Index>(spec.width()));
  m.bias = nn::Vector::Zero(kNumLabels);
  return m;
}

double ovr_loss(const BaselineModel& m, std::span<const std::vector<double>> x, std::span<const Label> y, double l2,
                BaselineModel* grad) {
  if (x.size() != y.size()) throw LengthMismatch("features and labels differ in length");
  if (grad) {
    grad->weights.resize(m.weights.rows(), m.weights.cols());
    grad->weights.setZero();
    grad->bias.resize(m.bias.size());
    grad->bias.setZero();
  }
  if (x.empty()) return 0.0;
  const double inv_n = 1.0 / static_cast<double>(x.size());
  double total = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i].size() != m.width()) throw ShapeError("feature row has the wrong width");
    const Eigen::Map<const nn::Vector> xi(x[i].data(), static_cast<Eigen::Index>(x[i].size()));
    const nn::Vector s = m.weights * xi + m.bias;
    for (std::size_t c = 0; c < kNumLabels; ++c) {
      const double target = static_cast<std::size_t>(index_of(y[i])) == c ? 1.0 : 0.0;
      total += softplus(s[c]) - target * s[c];
      if (grad) {
        const double d = (sigmoid(s[c]) - target) * inv_n;
        grad->weights.row(c) += d * xi.transpose();
        grad->bias[c] += d;
      }
    }
  }
  double loss = total * inv_n;
  if (l2 > 0) {
    loss += 0.5 * l2 * m.weights.squaredNorm();
    if (grad) grad->weights += l2 * m.weights;
  }
  return loss;
}

TrainResult train_baseline(std::span<const std::vector<double>> x, std::span<const Label> y,
                           const BaselineConfig& cfg, const FeatureSpec& spec) {
  cfg.validate(true);
  if (x.size() != y.size()) throw LengthMismatch("features and labels differ in length");
  if (x.empty()) throw ConfigError("empty training set");
  for (const auto& row : x)
    if (row.size() != spec.width()) throw ShapeError("feature row has the wrong width");

  TrainResult res{zero_model(spec), {}};
  auto& m = res.model;
  BaselineModel g = zero_model(spec);
  nn::Optimizer opt(cfg.train);
  const std::vector<nn::ParamSlot> slots{
      {{m.weights.data(), static_cast<std::size_t>(m.weights.size())},
       {g.weights.data(), static_cast<std::size_t>(g.weights.size())}},
      {{m.bias.data(), static_cast<std::size_t>(m.bias.size())}, {g.bias.data(), static_cast<std::size_t>(g.bias.size())}}};

  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(cfg.train.seed);
  const auto batch = static_cast<std::size_t>(cfg.train.batch_size);
  std::vector<std::vector<double>> bx;
  std::vector<Label> by;
  for (int epoch = 0; epoch < cfg.train.epochs; ++epoch) {
    rng.shuffle(order);
    double sum = 0;
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t end = std::min(order.size(), start + batch);
      bx.clear();
      by.clear();
      for (std::size_t i = start; i < end; ++i) bx.push_back(x[order[i]]), by.push_back(y[order[i]]);
      // ovr_loss keeps g's storage, so the slot spans stay valid.
      sum += ovr_loss(m, bx, by, cfg.l2, &g) * static_cast<double>(end - start);
      opt.step(slots);
    }
    res.epoch_losses.push_back(sum / static_cast<double>(order.size()));
  }
  return res;
}

codoc::Prediction predict_baseline(const BaselineModel& m, std::span<const double> features) {
  if (features.size() != m.width()) throw ShapeError("feature vector has the wrong width");
  const Eigen::Map<const nn::Vector> xi(features.data(), static_cast<Eigen::Index>(features.size()));
  const nn::Vector s = m.weights * xi + m.bias;
  const nn::Vector p = nn::softmax({s.data(), kNumLabels});
  codoc::Prediction out;
  for (std::size_t c = 0; c < kNumLabels; ++c) out.probs[c] = p[c];
  out.label = codoc::argmax_label({s.data(), kNumLabels});
  return out;
}

nlohmann::json to_json(const BaselineModel& m) {
  return {{"schemaVersion", 1},
          {"kind", "signature-baseline"},
          {"features", m.spec.to_json()},
          {"weights", nn::to_json(m.weights)},
          {"bias", std::vector<double>(m.bias.data(), m.bias.data() + m.bias.size())}};
}

BaselineModel baseline_from_json(const nlohmann::json& j) {
  try {
    if (j.at("schemaVersion").get<int>() != 1) throw FormatError("unsupported baseline schemaVersion");
    if (j.at("kind").get<std::string>() != "signature-baseline") throw FormatError("not a baseline model");
    BaselineModel m;
    m.spec = FeatureSpec::from_json(j.at("features"));
    m.weights = nn::matrix_from_json(j.at("weights"));
    const auto bias = j.at("bias").get<std::vector<double>>();
    if (m.weights.rows() != static_cast<Eigen::Index>(kNumLabels) ||
        m.weights.cols() != static_cast<Eigen::Index>(m.spec.width()) || bias.size() != kNumLabels)
      throw FormatError("baseline model has inconsistent shapes");
    for (double b : bias)
      if (!std::isfinite(b)) throw FormatError("baseline bias is not finite");
    m.bias = Eigen::Map<const nn::Vector>(bias.data(), kNumLabels);
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("baseline model: ") + e.what());
  }
}

namespace {

constexpr std::array<std::string_view, 8> kClasses{
    "android.telephony.TelephonyManager", "android.location.LocationManager", "android.telephony.SmsManager",
    "android.media.AudioService",         "android.widget.TextView",          "android.os.Parcel",
    "android.net.ConnectivityManager",    "android.content.ContentResolver"};
constexpr std::array<std::string_view, 9> kTypes{"void",     "int",    "long",           "boolean", "String",
                                                 "byte[]",   "Object", "List<String>", "String[]"};
constexpr std::array<std::string_view, 6> kNouns{"Value", "DeviceId", "Message", "Location", "Data", "Config"};
constexpr std::array<std::string_view, 6> kNeutralBodies{
    "{ return; }", "{ int n = 0; n = n + 1; }", "{ mCount = mCount + 1; }",
    "{ if (mFlag) { mFlag = false; } }", "{ helper(); }", "{ mLock.notifyAll(); }"};

struct HeaderGen {
  Rng& rng;
  std::size_t counter = 0;

  MethodRecord make(std::string_view prefix, std::string body) {
    MethodRecord r;
    r.fqcn = std::string(kClasses[rng.below(kClasses.size())]);
    r.name = std::string(prefix) + std::string(kNouns[rng.below(kNouns.size())]) + std::to_string(counter++);
    const std::size_t np = rng.below(4);
    for (std::size_t i = 0; i < np; ++i) {
      std::string t(kTypes[1 + rng.below(kTypes.size() - 1)]);
      r.params.push_back(t);
    }
    r.return_type = std::string(kTypes[rng.below(kTypes.size())]);
    r.modifiers.insert(Modifier::Public);
    if (rng.below(3) == 0) r.modifiers.insert(Modifier::Static);
    if (rng.below(4) == 0) r.modifiers.insert(Modifier::Final);
    r.body = std::move(body);
    r.doc = "Synthetic method.";
    r.doc_origin = DocOrigin{};
    r.signature = make_signature(r.fqcn, r.name, r.params, r.return_type);
    return r;
  }
};

constexpr std::array<std::string_view, 3> kSourcePrefixes{"get", "query", "read"};
constexpr std::array<std::string_view, 5> kSinkPrefixes{"send", "write", "put", "set", "update"};
constexpr std::array<std::string_view, 5> kNeitherPrefixes{"is", "has", "open", "close", "compute"};

template <std::size_t N>
std::string_view pick(Rng& rng, const std::array<std::string_view, N>& a) {
  return a[rng.below(N)];
}

std::vector<LabeledRecord> interleave(std::array<std::vector<LabeledRecord>, kNumLabels> by_class) {
  std::vector<LabeledRecord> out;
  const std::size_t n = by_class[0].size();
  for (std::size_t i = 0; i < n; ++i)
    for (auto& v : by_class) out.push_back(std::move(v[i]));
  return out;
}

}  // namespace

Label rule_label(std::string_view method_name) {
  for (auto p : kSourcePrefixes)
    if (has_name_prefix(method_name, p)) return Label::Source;
  for (auto p : kSinkPrefixes)
    if (has_name_prefix(method_name, p)) return Label::Sink;
  return Label::Neither;
}

std::vector<LabeledRecord> make_rule_dataset(std::size_t per_class, std::uint64_t seed) {
  Rng rng(mix_seed(seed));
  HeaderGen gen{rng};
  std::array<std::vector<LabeledRecord>, kNumLabels> by_class;
  for (std::size_t i = 0; i < per_class; ++i) {
    for (Label l : kAllLabels) {
      std::string_view prefix = l == Label::Source ? pick(rng, kSourcePrefixes)
                                : l == Label::Sink ? pick(rng, kSinkPrefixes)
                                                   : pick(rng, kNeitherPrefixes);
      by_class[index_of(l)].push_back({gen.make(prefix, std::string(pick(rng, kNeutralBodies))), l});
    }
  }
  return interleave(std::move(by_class));
}

std::vector<LabeledRecord> make_body_only_dataset(std::size_t per_class, std::uint64_t seed) {
  static constexpr std::array<std::string_view, 3> kSourceBodies{
      "{ return mService.readSecureId(\"imei\"); }", "{ Location l = mProvider.lastKnown(); return l; }",
      "{ Cursor c = mResolver.query(CONTACTS); return c; }"};
  static constexpr std::array<std::string_view, 3> kSinkBodies{
      "{ mRadio.transmit(pdu); }", "{ mOutput.write(buffer, 0, len); mOutput.flush(); }",
      "{ mSocket.send(packet); }"};
  Rng rng(mix_seed(seed ^ 0x5bd1e995ULL));
  HeaderGen gen{rng};
  std::array<std::string_view, 12> all_prefixes{};
  std::size_t n = 0;
  for (auto p : kSourcePrefixes) all_prefixes[n++] = p;
  for (auto p : kSinkPrefixes) all_prefixes[n++] = p;
  for (std::size_t i = 0; i < 4; ++i) all_prefixes[n++] = kNeitherPrefixes[i];
  std::array<std::vector<LabeledRecord>, kNumLabels> by_class;
  for (std::size_t i = 0; i < per_class; ++i) {
    for (Label l : kAllLabels) {
      std::string body(l == Label::Source ? pick(rng, kSourceBodies)
                       : l == Label::Sink ? pick(rng, kSinkBodies)
                                          : pick(rng, kNeutralBodies));
      by_class[index_of(l)].push_back({gen.make(pick(rng, all_prefixes), std::move(body)), l});
    }
  }
  return interleave(std::move(by_class));
}

CrossvalAccuracy crossval_accuracy(std::span<const LabeledRecord> data, std::size_t k, const BaselineConfig& cfg,
                                   std::uint64_t seed) {
  std::vector<std::vector<double>> x;
  std::vector<Label> y;
  for (const auto& d : data) x.push_back(extract_features(d.record)), y.push_back(d.label);
  const auto plan = codoc::stratified_kfold(y, k, seed);
  CrossvalAccuracy out;
  for (std::size_t f = 0; f < k; ++f) {
    std::vector<std::vector<double>> tx;
    std::vector<Label> ty;
    for (auto i : plan.train_indices(f)) tx.push_back(x[i]), ty.push_back(y[i]);
    BaselineConfig fold_cfg = cfg;
    fold_cfg.train.seed = mix_seed(seed ^ mix_seed(f + 1));
    const auto model = train_baseline(tx, ty, fold_cfg).model;
    for (auto i : plan.test_indices(f)) out.confusion.add(y[i], predict_baseline(model, x[i]).label);
  }
  std::size_t correct = 0;
  for (std::size_t c = 0; c < kNumLabels; ++c) correct += out.confusion.counts[c][c];
  out.accuracy = static_cast<double>(correct) / static_cast<double>(out.confusion.total());
  return out;
}

}  // namespace apisift::susi
