#include <algorithm>
#include <filesystem>

#include "apisift/code_embed.hpp"
#include "apisift/doc_embed.hpp"
#include "apisift/error.hpp"
#include "apisift/tables.hpp"
#include "apisift/vector_store.hpp"
#include "context.hpp"

namespace apisift::cli {

namespace {

namespace fs = std::filesystem;

struct ExtractArgs {
  std::string src;
  std::string output;
};

void run_extract(Context& ctx, const ExtractArgs& a) {
  ctx.set_command("extract");
  if (!fs::is_directory(a.src)) throw FormatError("not a directory: " + a.src);
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(a.src))
    if (e.is_regular_file() && e.path().extension() == ".java") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) ctx.read_input(f);
  const auto records = extract_directory(a.src);
  ctx.set_output_root(a.output);
  ctx.write_output(a.output, write_corpus(records));
  ctx.out() << nlohmann::json{{"files", files.size()}, {"methods", records.size()}}.dump() << '\n';
}

struct StatsArgs {
  std::string corpus;
  std::size_t bucket_width = 10;
  std::string output;
};

void run_stats(Context& ctx, const StatsArgs& a) {
  ctx.set_command("stats");
  write_json(ctx, a.output, to_json(corpus_stats(load_corpus(ctx, a.corpus), a.bucket_width)));
}

struct TrainCodeArgs {
  std::string corpus;
  std::string config;
  std::string output;
  std::uint64_t seed = 0;
  int epochs = 0;
  double lr = 0;
  int batch = 0;
  std::size_t max_len = 0, max_width = 0, token_dim = 0, vector_dim = 0, max_contexts = 0;
};

void run_train_code(Context& ctx, const TrainCodeArgs& a, const CLI::App& sub) {
  ctx.set_command("train-code");
  code::CodeEmbedConfig cfg;
  if (!a.config.empty()) cfg = code::CodeEmbedConfig::from_json(nlohmann::json::parse(ctx.read_input(a.config)));
  if (sub.count("--epochs")) cfg.train.epochs = a.epochs;
  if (sub.count("--lr")) cfg.train.learning_rate = a.lr;
  if (sub.count("--batch")) cfg.train.batch_size = a.batch;
  if (sub.count("--max-len")) cfg.limits.max_length = a.max_len;
  if (sub.count("--max-width")) cfg.limits.max_width = a.max_width;
  if (sub.count("--token-dim")) cfg.token_dim = a.token_dim;
  if (sub.count("--vector-dim")) cfg.vector_dim = a.vector_dim;
  if (sub.count("--max-contexts")) cfg.max_contexts = a.max_contexts;
  cfg.train.seed = ctx.seed("seed", sub.count("--seed") ? a.seed : cfg.train.seed);
  cfg.validate();
  ctx.set_config(cfg.to_json());
  const auto result = code::train_code_embedder(load_corpus(ctx, a.corpus), cfg);
  ctx.set_output_root(a.output);
  ctx.write_output(a.output, code::to_json(result.params).dump() + "\n");
  ctx.out() << nlohmann::json{{"epochLosses", result.epoch_losses}, {"skippedEmpty", result.skipped_empty}}.dump()
            << '\n';
}

struct EmbedCodeArgs {
  std::string corpus;
  std::string params;
  std::string output;
};

void run_embed_code(Context& ctx, const EmbedCodeArgs& a) {
  ctx.set_command("embed-code");
  const auto params = code::params_from_json(nlohmann::json::parse(ctx.read_input(a.params)));
  ctx.set_config(params.config.to_json());
  std::vector<VectorRow> rows;
  std::size_t empty = 0;
  for (const auto& r : load_corpus(ctx, a.corpus)) {
    auto e = code::embed_code(r, params);
    empty += e.empty_bag;
    rows.push_back({r.signature, std::vector<double>(e.values.data(), e.values.data() + e.values.size())});
  }
  ctx.set_output_root(a.output);
  ctx.write_output(a.output, format_vectors(rows));
  ctx.out() << nlohmann::json{{"vectors", rows.size()}, {"emptyBags", empty}}.dump() << '\n';
}

struct EmbedDocArgs {
  std::string corpus;
  std::string import;
  std::string output;
  bool idf = false;
  bool keep_tags = false;
  std::size_t buckets = std::size_t{1} << 18;
  std::uint64_t seed = 0;
};

void run_embed_doc(Context& ctx, const EmbedDocArgs& a) {
  ctx.set_command("embed-doc");
  const auto corpus = load_corpus(ctx, a.corpus);
  std::vector<VectorRow> rows;
  std::size_t zero = 0;
  if (!a.import.empty()) {
    const auto external = doc::load_external_vectors(ctx.read_input(a.import));
    ctx.set_config({{"import", a.import}});
    for (const auto& r : corpus) {
      const auto it = external.find(r.signature);
      if (it == external.end()) throw FormatError("no imported vector for '" + r.signature + "'");
      zero += it->second.zero_doc;
      rows.push_back({r.signature, it->second.values});
    }
  } else {
    doc::DocPipelineConfig cfg;
    cfg.hash_buckets = a.buckets;
    cfg.strip_tags = !a.keep_tags;
    cfg.projection_seed = ctx.seed("projectionSeed", a.seed);
    std::vector<std::vector<std::string>> tokens;
    for (const auto& r : corpus) tokens.push_back(doc::normalize_doc(r.doc.value_or(""), cfg.strip_tags));
    if (a.idf) cfg.idf = doc::compute_idf(tokens);
    cfg.validate();
    ctx.set_config(cfg.to_json());
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      auto v = doc::embed_doc(tokens[i], cfg);
      zero += v.zero_doc;
      rows.push_back({corpus[i].signature, std::move(v.values)});
    }
  }
  ctx.set_output_root(a.output);
  ctx.write_output(a.output, format_vectors(rows));
  ctx.out() << nlohmann::json{{"vectors", rows.size()}, {"zeroDocs", zero}}.dump() << '\n';
}

struct SynthArgs {
  std::string output;
  std::size_t per_class = 200;
  double doc_separation = 1.0;
  double code_separation = 1.0;
  double noise = 1.0;
  std::uint64_t seed = 0;
};

void run_synth(Context& ctx, const SynthArgs& a) {
  ctx.set_command("synth");
  codoc::SyntheticConfig cfg;
  cfg.per_class = {a.per_class, a.per_class, a.per_class};
  cfg.doc_separation = a.doc_separation;
  cfg.code_separation = a.code_separation;
  cfg.noise = a.noise;
  cfg.seed = ctx.seed("seed", a.seed);
  if (a.per_class == 0) throw ConfigError("--per-class must be positive");
  ctx.set_config({{"perClass", a.per_class},
                  {"docSeparation", a.doc_separation},
                  {"codeSeparation", a.code_separation},
                  {"noise", a.noise}});
  const auto d = codoc::make_synthetic(cfg);
  std::vector<LabelRow> labels;
  std::vector<VectorRow> doc_rows, code_rows;
  for (const auto& e : d.examples) {
    labels.push_back({e.signature, e.label, "synthetic"});
    doc_rows.push_back({e.signature, {e.doc.data(), e.doc.data() + e.doc.size()}});
    code_rows.push_back({e.signature, {e.code.data(), e.code.data() + e.code.size()}});
  }
  const fs::path dir(a.output);
  ctx.set_output_root(dir);
  ctx.write_output(dir / "labels.csv", format_labels_csv(labels));
  ctx.write_output(dir / "doc.vec", format_vectors(doc_rows));
  ctx.write_output(dir / "code.vec", format_vectors(code_rows));
}

}  // namespace

void register_pipeline_commands(CLI::App& app, Context& ctx) {
  {
    auto a = std::make_shared<ExtractArgs>();
    auto* sub = app.add_subcommand("extract", "Parse a Java source tree into a method corpus (JSON Lines)");
    sub->add_option("srcdir", a->src, "Source directory")->required();
    sub->add_option("-o,--output", a->output, "Corpus file")->required();
    sub->callback([&ctx, a] { run_extract(ctx, *a); });
  }
  {
    auto a = std::make_shared<StatsArgs>();
    auto* sub = app.add_subcommand("stats", "Documentation length statistics of a corpus");
    sub->add_option("corpus", a->corpus)->required();
    sub->add_option("--bucket-width", a->bucket_width)->check(CLI::PositiveNumber);
    sub->add_option("-o,--output", a->output, "JSON report (default stdout)");
    sub->callback([&ctx, a] { run_stats(ctx, *a); });
  }
  {
    auto a = std::make_shared<TrainCodeArgs>();
    auto* sub = app.add_subcommand("train-code", "Train the path-context code embedder on name prediction");
    sub->add_option("corpus", a->corpus)->required();
    sub->add_option("-o,--output", a->output, "Embedder parameters (JSON)")->required();
    sub->add_option("--config", a->config, "Embedder config JSON");
    sub->add_option("--seed", a->seed);
    sub->add_option("--epochs", a->epochs)->check(CLI::NonNegativeNumber);
    sub->add_option("--lr", a->lr);
    sub->add_option("--batch", a->batch)->check(CLI::PositiveNumber);
    sub->add_option("--max-len", a->max_len);
    sub->add_option("--max-width", a->max_width);
    sub->add_option("--token-dim", a->token_dim)->check(CLI::PositiveNumber);
    sub->add_option("--vector-dim", a->vector_dim)->check(CLI::PositiveNumber);
    sub->add_option("--max-contexts", a->max_contexts)->check(CLI::PositiveNumber);
    sub->callback([&ctx, a, sub] { run_train_code(ctx, *a, *sub); });
  }
  {
    auto a = std::make_shared<EmbedCodeArgs>();
    auto* sub = app.add_subcommand("embed-code", "Embed method bodies with trained parameters");
    sub->add_option("corpus", a->corpus)->required();
    sub->add_option("--params", a->params, "Output of train-code")->required();
    sub->add_option("-o,--output", a->output, "Vector file")->required();
    sub->callback([&ctx, a] { run_embed_code(ctx, *a); });
  }
  {
    auto a = std::make_shared<EmbedDocArgs>();
    auto* sub = app.add_subcommand("embed-doc", "Embed documentation (hashed TF projection or imported vectors)");
    sub->add_option("corpus", a->corpus)->required();
    sub->add_option("-o,--output", a->output, "Vector file")->required();
    sub->add_option("--import", a->import, "External 768-wide vector file keyed by signature");
    sub->add_flag("--idf", a->idf, "Weight terms by corpus IDF");
    sub->add_flag("--keep-tags", a->keep_tags, "Keep doc markup tokens");
    sub->add_option("--buckets", a->buckets, "Hash buckets");
    sub->add_option("--seed", a->seed, "Projection seed");
    sub->callback([&ctx, a] { run_embed_doc(ctx, *a); });
  }
  {
    auto a = std::make_shared<SynthArgs>();
    auto* sub = app.add_subcommand("synth", "Write a seeded synthetic labelled dataset (labels.csv, doc.vec, code.vec)");
    sub->add_option("-o,--output", a->output, "Output directory")->required();
    sub->add_option("--per-class", a->per_class);
    sub->add_option("--doc-separation", a->doc_separation)->check(CLI::NonNegativeNumber);
    sub->add_option("--code-separation", a->code_separation)->check(CLI::NonNegativeNumber);
    sub->add_option("--noise", a->noise)->check(CLI::NonNegativeNumber);
    sub->add_option("--seed", a->seed);
    sub->callback([&ctx, a] { run_synth(ctx, *a); });
  }
}

}  // namespace apisift::cli
