#include "apisift/code_embed.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "apisift/ast.hpp"
#include "apisift/error.hpp"
#include "apisift/rng.hpp"

namespace apisift::code {

using nn::Matrix;
using nn::Vector;

Vocab::Vocab(const std::vector<std::string>& symbols) : Vocab() {
  for (const auto& s : symbols)
    if (index_.emplace(s, symbols_.size()).second) symbols_.push_back(s);
}

std::size_t Vocab::id(const std::string& s) const {
  const auto it = index_.find(s);
  return it == index_.end() ? 0 : it->second;
}

void CodeEmbedConfig::validate() const {
  if (limits.max_length < 2) throw ConfigError("maxLen must be at least 2");
  if (limits.max_width < 1) throw ConfigError("maxWidth must be at least 1");
  if (token_dim == 0 || vector_dim == 0) throw ConfigError("embedding widths must be positive");
  if (max_contexts == 0) throw ConfigError("context cap must be positive");
  train.validate();
}

nlohmann::json CodeEmbedConfig::to_json() const {
  return {{"maxLen", limits.max_length}, {"maxWidth", limits.max_width}, {"tokenDim", token_dim},
          {"vectorDim", vector_dim},     {"maxContexts", max_contexts},   {"train", train.to_json()}};
}

CodeEmbedConfig CodeEmbedConfig::from_json(const nlohmann::json& j) {
  CodeEmbedConfig c;
  c.limits.max_length = j.value("maxLen", c.limits.max_length);
  c.limits.max_width = j.value("maxWidth", c.limits.max_width);
  c.token_dim = j.value("tokenDim", c.token_dim);
  c.vector_dim = j.value("vectorDim", c.vector_dim);
  c.max_contexts = j.value("maxContexts", c.max_contexts);
  if (j.contains("train")) c.train = nn::TrainConfig::from_json(j.at("train"));
  return c;
}

std::vector<PathContext> method_contexts(const MethodRecord& record, const CodeEmbedConfig& cfg, std::uint64_t seed) {
  std::vector<PathContext> all = extract_path_contexts(build_ast(record), cfg.limits);
  if (all.size() <= cfg.max_contexts) return all;
  Rng rng(mix_seed(fnv1a64(record.signature) ^ seed));
  std::vector<std::size_t> idx(all.size());
  std::iota(idx.begin(), idx.end(), 0);
  // Partial Fisher-Yates: the first max_contexts slots are a uniform sample.
  for (std::size_t i = 0; i < cfg.max_contexts; ++i)
    std::swap(idx[i], idx[i + static_cast<std::size_t>(rng.below(idx.size() - i))]);
  idx.resize(cfg.max_contexts);
  std::sort(idx.begin(), idx.end());
  std::vector<PathContext> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(std::move(all[i]));
  return out;
}

Vocabularies build_vocabularies(const std::vector<std::vector<PathContext>>& bags,
                                const std::vector<MethodRecord>& corpus) {
  std::set<std::string> tokens, paths, names;
  for (const auto& bag : bags)
    for (const auto& c : bag) {
      tokens.insert(c.left);
      tokens.insert(c.right);
      paths.insert(path_string(c));
    }
  for (const auto& r : corpus) names.insert(r.name);
  return {Vocab({tokens.begin(), tokens.end()}), Vocab({paths.begin(), paths.end()}),
          Vocab({names.begin(), names.end()})};
}

std::vector<ContextIds> to_ids(const std::vector<PathContext>& bag, const EmbedderParams& params) {
  std::vector<ContextIds> out;
  out.reserve(bag.size());
  for (const auto& c : bag)
    out.push_back({params.tokens.id(c.left), params.paths.id(path_string(c)), params.tokens.id(c.right)});
  return out;
}

namespace {

void fill_uniform(Matrix& m, double limit, Rng& rng) {
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(-limit, limit);
}

struct ForwardState {
  Matrix x;  // n x 3d
  Matrix c;  // n x dim, tanh outputs
  Vector alpha;
  Vector v;
};

ForwardState run_forward(const std::vector<ContextIds>& contexts, const EmbedderParams& p) {
  const auto d = static_cast<Eigen::Index>(p.config.token_dim);
  const auto n = static_cast<Eigen::Index>(contexts.size());
  ForwardState s;
  s.v = Vector::Zero(static_cast<Eigen::Index>(p.config.vector_dim));
  if (n == 0) return s;
  s.x.resize(n, 3 * d);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& c = contexts[static_cast<std::size_t>(i)];
    if (c.left >= p.tokens.size() || c.right >= p.tokens.size() || c.path >= p.paths.size())
      throw IndexError("context id outside the vocabulary");
    s.x.row(i).segment(0, d) = p.token_embeddings.row(static_cast<Eigen::Index>(c.left));
    s.x.row(i).segment(d, d) = p.path_embeddings.row(static_cast<Eigen::Index>(c.path));
    s.x.row(i).segment(2 * d, d) = p.token_embeddings.row(static_cast<Eigen::Index>(c.right));
  }
  Matrix z = s.x * p.combiner.weights.transpose();
  z.rowwise() += p.combiner.bias.transpose();
  s.c = z.array().tanh().matrix();
  const Vector scores = s.c * p.attention;
  s.alpha = nn::softmax({scores.data(), static_cast<std::size_t>(scores.size())});
  s.v = s.c.transpose() * s.alpha;
  return s;
}

}  // namespace

EmbedderParams init_params(Vocabularies vocabs, const CodeEmbedConfig& cfg, std::uint64_t seed) {
  if (cfg.token_dim == 0 || cfg.vector_dim == 0) throw ConfigError("embedding widths must be positive");
  EmbedderParams p;
  p.config = cfg;
  p.tokens = std::move(vocabs.tokens);
  p.paths = std::move(vocabs.paths);
  p.names = std::move(vocabs.names);
  Rng rng(seed);
  const auto d = static_cast<Eigen::Index>(cfg.token_dim);
  const auto dim = static_cast<Eigen::Index>(cfg.vector_dim);
  p.token_embeddings.resize(static_cast<Eigen::Index>(p.tokens.size()), d);
  p.path_embeddings.resize(static_cast<Eigen::Index>(p.paths.size()), d);
  fill_uniform(p.token_embeddings, 1.0, rng);
  fill_uniform(p.path_embeddings, 1.0, rng);
  p.combiner = nn::make_layer(3 * cfg.token_dim, cfg.vector_dim, nn::Activation::Tanh, rng);
  // Glorot scaling keeps tanh out of saturation at initialization.
  p.combiner.weights *= std::sqrt(3.0 * static_cast<double>(cfg.token_dim) /
                                  static_cast<double>(3 * cfg.token_dim + cfg.vector_dim));
  p.attention.resize(dim);
  for (Eigen::Index i = 0; i < dim; ++i) p.attention[i] = rng.uniform(-1.0, 1.0) / std::sqrt(static_cast<double>(dim));
  p.name_embeddings.resize(static_cast<Eigen::Index>(p.names.size()), dim);
  fill_uniform(p.name_embeddings, std::sqrt(3.0 / static_cast<double>(dim)), rng);
  return p;
}

CodeEmbedding embed_contexts(const std::vector<ContextIds>& contexts, const EmbedderParams& params) {
  ForwardState s = run_forward(contexts, params);
  CodeEmbedding e;
  e.values = std::move(s.v);
  e.empty_bag = contexts.empty();
  e.attention.assign(s.alpha.data(), s.alpha.data() + s.alpha.size());
  return e;
}

CodeEmbedding embed_code(const MethodRecord& record, const EmbedderParams& params) {
  return embed_contexts(to_ids(method_contexts(record, params.config, params.config.train.seed), params), params);
}

EmbedderGradients EmbedderGradients::zeros_like(const EmbedderParams& p) {
  EmbedderGradients g;
  g.token_embeddings = Matrix::Zero(p.token_embeddings.rows(), p.token_embeddings.cols());
  g.path_embeddings = Matrix::Zero(p.path_embeddings.rows(), p.path_embeddings.cols());
  g.combiner_weights = Matrix::Zero(p.combiner.weights.rows(), p.combiner.weights.cols());
  g.combiner_bias = Vector::Zero(p.combiner.bias.size());
  g.attention = Vector::Zero(p.attention.size());
  g.name_embeddings = Matrix::Zero(p.name_embeddings.rows(), p.name_embeddings.cols());
  return g;
}

double name_loss(const std::vector<ContextIds>& contexts, std::size_t name, const EmbedderParams& params,
                 EmbedderGradients* grads) {
  const ForwardState s = run_forward(contexts, params);
  const Vector logits = params.name_embeddings * s.v;
  const auto lr = nn::softmax_cross_entropy({logits.data(), static_cast<std::size_t>(logits.size())}, name);
  if (!grads) return lr.loss;

  Vector dlogits = lr.probabilities;
  dlogits[static_cast<Eigen::Index>(name)] -= 1.0;
  grads->name_embeddings.noalias() += dlogits * s.v.transpose();
  if (contexts.empty()) return lr.loss;

  const Vector dv = params.name_embeddings.transpose() * dlogits;
  // Through v = sum_i alpha_i c_i with alpha = softmax(c_i . a).
  const Vector gc = s.c * dv;  // g . c_i
  const double gbar = s.alpha.dot(gc);
  const Vector dscore = s.alpha.cwiseProduct((gc.array() - gbar).matrix());
  Matrix dc = s.alpha * dv.transpose();
  dc.noalias() += dscore * params.attention.transpose();
  grads->attention.noalias() += s.c.transpose() * dscore;

  const Matrix dz = dc.cwiseProduct((1.0 - s.c.array().square()).matrix());
  grads->combiner_weights.noalias() += dz.transpose() * s.x;
  grads->combiner_bias += dz.colwise().sum().transpose();
  const Matrix dx = dz * params.combiner.weights;
  const auto d = static_cast<Eigen::Index>(params.config.token_dim);
  for (std::size_t i = 0; i < contexts.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    grads->token_embeddings.row(static_cast<Eigen::Index>(contexts[i].left)) += dx.row(r).segment(0, d);
    grads->path_embeddings.row(static_cast<Eigen::Index>(contexts[i].path)) += dx.row(r).segment(d, d);
    grads->token_embeddings.row(static_cast<Eigen::Index>(contexts[i].right)) += dx.row(r).segment(2 * d, d);
  }
  return lr.loss;
}

std::vector<nn::ParamSlot> param_slots(EmbedderParams& p, const EmbedderGradients& g) {
  auto slot = [](auto& value, const auto& grad) {
    return nn::ParamSlot{{value.data(), static_cast<std::size_t>(value.size())},
                         {grad.data(), static_cast<std::size_t>(grad.size())}};
  };
  return {slot(p.token_embeddings, g.token_embeddings), slot(p.path_embeddings, g.path_embeddings),
          slot(p.combiner.weights, g.combiner_weights),  slot(p.combiner.bias, g.combiner_bias),
          slot(p.attention, g.attention),                slot(p.name_embeddings, g.name_embeddings)};
}

std::size_t predict_name(const std::vector<ContextIds>& contexts, const EmbedderParams& params) {
  const Vector logits = params.name_embeddings * run_forward(contexts, params).v;
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < logits.size(); ++i)
    if (logits[i] > logits[best]) best = i;
  return static_cast<std::size_t>(best);
}

CodeTrainingResult train_code_embedder(const std::vector<MethodRecord>& corpus, const CodeEmbedConfig& cfg) {
  if (corpus.empty()) throw ConfigError("cannot train the code embedder on an empty corpus");
  cfg.validate();
  std::vector<std::vector<PathContext>> bags;
  bags.reserve(corpus.size());
  for (const auto& r : corpus) bags.push_back(method_contexts(r, cfg, cfg.train.seed));

  CodeTrainingResult result;
  result.params = init_params(build_vocabularies(bags, corpus), cfg, cfg.train.seed);
  EmbedderParams& p = result.params;

  std::vector<TrainingExample> examples;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (bags[i].empty()) {
      ++result.skipped_empty;
      continue;
    }
    examples.push_back({to_ids(bags[i], p), p.names.id(corpus[i].name)});
  }

  Rng order_rng(mix_seed(cfg.train.seed));
  nn::Optimizer opt(cfg.train);
  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), 0);
  const auto batch = static_cast<std::size_t>(cfg.train.batch_size);
  for (int epoch = 0; epoch < cfg.train.epochs; ++epoch) {
    order_rng.shuffle(order);
    double total = 0.0;
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t end = std::min(order.size(), start + batch);
      EmbedderGradients g = EmbedderGradients::zeros_like(p);
      for (std::size_t k = start; k < end; ++k) total += name_loss(examples[order[k]].contexts, examples[order[k]].name, p, &g);
      const double scale = 1.0 / static_cast<double>(end - start);
      g.token_embeddings *= scale;
      g.path_embeddings *= scale;
      g.combiner_weights *= scale;
      g.combiner_bias *= scale;
      g.attention *= scale;
      g.name_embeddings *= scale;
      opt.step(param_slots(p, g));
    }
    result.epoch_losses.push_back(examples.empty() ? 0.0 : total / static_cast<double>(examples.size()));
  }
  return result;
}

nlohmann::json to_json(const EmbedderParams& p) {
  return {{"schemaVersion", kParamsSchemaVersion},
          {"config", p.config.to_json()},
          {"tokens", p.tokens.symbols()},
          {"paths", p.paths.symbols()},
          {"names", p.names.symbols()},
          {"tokenEmbeddings", nn::to_json(p.token_embeddings)},
          {"pathEmbeddings", nn::to_json(p.path_embeddings)},
          {"combiner", nn::to_json(p.combiner)},
          {"attention", std::vector<double>(p.attention.data(), p.attention.data() + p.attention.size())},
          {"nameEmbeddings", nn::to_json(p.name_embeddings)}};
}

namespace {

Vocab vocab_from_json(const nlohmann::json& j, const char* what) {
  auto symbols = j.get<std::vector<std::string>>();
  if (symbols.empty() || symbols.front() != Vocab::kUnknown)
    throw FormatError(std::string(what) + " vocabulary must start with the unknown symbol");
  const std::size_t n = symbols.size();
  Vocab v({symbols.begin() + 1, symbols.end()});
  if (v.size() != n) throw FormatError(std::string(what) + " vocabulary has duplicate symbols");
  return v;
}

}  // namespace

EmbedderParams params_from_json(const nlohmann::json& j) {
  try {
    if (j.at("schemaVersion").get<int>() != kParamsSchemaVersion)
      throw FormatError("unsupported params schema version " + j.at("schemaVersion").dump());
    EmbedderParams p;
    p.config = CodeEmbedConfig::from_json(j.at("config"));
    p.tokens = vocab_from_json(j.at("tokens"), "token");
    p.paths = vocab_from_json(j.at("paths"), "path");
    p.names = vocab_from_json(j.at("names"), "name");
    p.token_embeddings = nn::matrix_from_json(j.at("tokenEmbeddings"));
    p.path_embeddings = nn::matrix_from_json(j.at("pathEmbeddings"));
    p.combiner = nn::layer_from_json(j.at("combiner"));
    const auto att = j.at("attention").get<std::vector<double>>();
    p.attention = Eigen::Map<const Vector>(att.data(), static_cast<Eigen::Index>(att.size()));
    p.name_embeddings = nn::matrix_from_json(j.at("nameEmbeddings"));

    const auto d = static_cast<Eigen::Index>(p.config.token_dim);
    const auto dim = static_cast<Eigen::Index>(p.config.vector_dim);
    const bool ok = p.token_embeddings.rows() == static_cast<Eigen::Index>(p.tokens.size()) &&
                    p.token_embeddings.cols() == d &&
                    p.path_embeddings.rows() == static_cast<Eigen::Index>(p.paths.size()) &&
                    p.path_embeddings.cols() == d && p.combiner.weights.cols() == 3 * d &&
                    p.combiner.weights.rows() == dim && p.attention.size() == dim &&
                    p.name_embeddings.rows() == static_cast<Eigen::Index>(p.names.size()) &&
                    p.name_embeddings.cols() == dim;
    if (!ok) throw FormatError("params shapes do not match their vocabularies and config");
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed params: ") + e.what());
  }
}

}  // namespace apisift::code
