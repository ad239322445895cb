#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "apisift/extractor.hpp"
#include "apisift/neuralnet.hpp"
#include "apisift/path_context.hpp"

namespace apisift::code {

/// Symbol table with a reserved unknown symbol at id 0.
class Vocab {
 public:
  static constexpr const char* kUnknown = "<unk>";

  Vocab() : symbols_{kUnknown} { index_.emplace(kUnknown, 0); }
  /// Ids are assigned in the order of `symbols` after de-duplication.
  explicit Vocab(const std::vector<std::string>& symbols);

  std::size_t id(const std::string& s) const;
  const std::string& symbol(std::size_t id) const { return symbols_.at(id); }
  std::size_t size() const { return symbols_.size(); }
  const std::vector<std::string>& symbols() const { return symbols_; }

 private:
  std::vector<std::string> symbols_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct CodeEmbedConfig {
  PathLimits limits{};
  std::size_t token_dim = 128;
  std::size_t vector_dim = 384;
  std::size_t max_contexts = 200;
  nn::TrainConfig train{};

  void validate() const;
  nlohmann::json to_json() const;
  static CodeEmbedConfig from_json(const nlohmann::json& j);
};

struct ContextIds {
  std::size_t left = 0;
  std::size_t path = 0;
  std::size_t right = 0;
  bool operator==(const ContextIds&) const = default;
};

struct EmbedderParams {
  CodeEmbedConfig config;
  Vocab tokens;
  Vocab paths;
  Vocab names;
  nn::Matrix token_embeddings;  // |tokens| x d
  nn::Matrix path_embeddings;   // |paths| x d
  nn::DenseLayer combiner;      // 3d -> vector_dim, tanh
  nn::Vector attention;         // vector_dim
  nn::Matrix name_embeddings;   // |names| x vector_dim
};

/// Path contexts of a method, capped at `max_contexts` by a uniform sample
/// seeded from the signature and `seed`; sampled contexts keep source order.
std::vector<PathContext> method_contexts(const MethodRecord& record, const CodeEmbedConfig& cfg, std::uint64_t seed);

/// Token, path and name vocabularies over a corpus (lexicographic ids).
struct Vocabularies {
  Vocab tokens;
  Vocab paths;
  Vocab names;
};
Vocabularies build_vocabularies(const std::vector<std::vector<PathContext>>& bags,
                                const std::vector<MethodRecord>& corpus);

std::vector<ContextIds> to_ids(const std::vector<PathContext>& bag, const EmbedderParams& params);

EmbedderParams init_params(Vocabularies vocabs, const CodeEmbedConfig& cfg, std::uint64_t seed);

struct CodeEmbedding {
  nn::Vector values;
  std::vector<double> attention;  // one weight per context
  bool empty_bag = false;
};

CodeEmbedding embed_contexts(const std::vector<ContextIds>& contexts, const EmbedderParams& params);
/// Parses the body, extracts and samples contexts, and aggregates them.
CodeEmbedding embed_code(const MethodRecord& record, const EmbedderParams& params);

/// Dense gradients with the shapes of the trainable parameters.
struct EmbedderGradients {
  nn::Matrix token_embeddings;
  nn::Matrix path_embeddings;
  nn::Matrix combiner_weights;
  nn::Vector combiner_bias;
  nn::Vector attention;
  nn::Matrix name_embeddings;

  static EmbedderGradients zeros_like(const EmbedderParams& p);
};

/// Softmax cross-entropy of predicting `name` from the aggregated vector.
/// Adds d loss / d params into `grads` when given.
double name_loss(const std::vector<ContextIds>& contexts, std::size_t name, const EmbedderParams& params,
                 EmbedderGradients* grads = nullptr);

std::vector<nn::ParamSlot> param_slots(EmbedderParams& p, const EmbedderGradients& g);

/// Id of the highest-scoring name for a bag.
std::size_t predict_name(const std::vector<ContextIds>& contexts, const EmbedderParams& params);

struct TrainingExample {
  std::vector<ContextIds> contexts;
  std::size_t name = 0;
};

struct CodeTrainingResult {
  EmbedderParams params;
  std::vector<double> epoch_losses;
  std::size_t skipped_empty = 0;
};

/// Builds vocabularies over the corpus, initializes from cfg.train.seed and
/// trains on name prediction. Throws ConfigError on an empty corpus, a
/// non-positive learning rate or negative epochs.
CodeTrainingResult train_code_embedder(const std::vector<MethodRecord>& corpus, const CodeEmbedConfig& cfg);

nlohmann::json to_json(const EmbedderParams& p);
EmbedderParams params_from_json(const nlohmann::json& j);

inline constexpr int kParamsSchemaVersion = 1;

}  // namespace apisift::code
