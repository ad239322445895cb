#include <algorithm>
#include <numeric>

#include "apisift/error.hpp"
#include "apisift/susi.hpp"
#include "apisift/tables.hpp"
#include "context.hpp"

namespace apisift::cli {

namespace {

struct DataArgs {
  std::string labels;
  std::string doc;
  std::string code;
  std::string rater;
};

struct TrainArgs {
  std::uint64_t seed = 0;
  int epochs = 10;
  double lr = 1e-3;
  int batch = 32;
  std::string optimizer = "adam";
  bool class_weights = false;
  std::string mode = "both";
};

void add_data_options(CLI::App* sub, DataArgs& d) {
  sub->add_option("--labels", d.labels, "Labels CSV (signature,label[,rater])")->required();
  sub->add_option("--doc", d.doc, "Doc vector file")->required();
  sub->add_option("--code", d.code, "Code vector file")->required();
  sub->add_option("--rater", d.rater, "Use only this rater's labels");
}

void add_train_options(CLI::App* sub, TrainArgs& t) {
  sub->add_option("--seed", t.seed);
  sub->add_option("--epochs", t.epochs)->check(CLI::NonNegativeNumber);
  sub->add_option("--lr", t.lr)->check(CLI::PositiveNumber);
  sub->add_option("--batch", t.batch)->check(CLI::PositiveNumber);
  sub->add_option("--optimizer", t.optimizer)->check(CLI::IsMember({"adam", "sgd"}));
  sub->add_flag("--class-weights", t.class_weights, "Weight the loss by inverse class frequency");
}

struct LoadedData {
  codoc::Dataset dataset;
  std::string signature_digest;
};

LoadedData load_data(Context& ctx, const DataArgs& d) {
  const auto labels = resolve_labels(parse_labels_csv(ctx.read_input(d.labels)), d.rater);
  if (labels.empty()) throw FormatError("no labels" + (d.rater.empty() ? std::string() : " for rater '" + d.rater + "'"));
  const auto doc = load_vectors(ctx, d.doc);
  const auto code = load_vectors(ctx, d.code);
  return {build_dataset(labels, doc, code), signature_set_digest(doc)};
}

codoc::TrainOptions train_options(const TrainArgs& t, std::uint64_t seed, const codoc::Dataset& d) {
  codoc::TrainOptions o;
  o.train.epochs = t.epochs;
  o.train.learning_rate = t.lr;
  o.train.batch_size = t.batch;
  o.train.optimizer = t.optimizer == "sgd" ? nn::OptimizerKind::Sgd : nn::OptimizerKind::Adam;
  o.train.seed = seed;
  o.train.validate();
  if (t.class_weights) o.class_weights = codoc::inverse_frequency_weights(d.labels());
  return o;
}

struct TrainCmd {
  DataArgs data;
  TrainArgs train;
  std::string output;
};

void run_train(Context& ctx, const TrainCmd& a) {
  ctx.set_command("train");
  const auto data = load_data(ctx, a.data);
  const std::uint64_t seed = ctx.seed("seed", a.train.seed);
  const auto mode = codoc::parse_input_mode(a.train.mode);
  auto model = codoc::build_model(codoc::ModelConfig{}, seed, mode);
  const auto opt = train_options(a.train, mix_seed(seed), data.dataset);
  ctx.set_config({{"model", model.config.to_json()}, {"mode", a.train.mode}, {"train", opt.train.to_json()},
                  {"classWeights", a.train.class_weights}});
  std::vector<std::size_t> all(data.dataset.examples.size());
  std::iota(all.begin(), all.end(), 0);
  const auto losses = codoc::train_model(model, data.dataset, all, opt);
  auto j = codoc::to_json(model);
  j["dataset"] = {{"signatureDigest", data.signature_digest}, {"examples", all.size()}};
  ctx.set_output_root(a.output);
  ctx.write_output(a.output, j.dump() + "\n");
  ctx.out() << nlohmann::json{{"examples", all.size()}, {"epochLosses", losses}}.dump() << '\n';
}

struct CrossvalCmd {
  DataArgs data;
  TrainArgs train;
  std::size_t k = 10;
  std::string binary;
  bool parallel = false;
  std::string output;
};

codoc::CrossvalConfig crossval_config(Context& ctx, const CrossvalCmd& a, const codoc::Dataset& d) {
  codoc::CrossvalConfig cfg;
  cfg.k = a.k;
  cfg.seed = ctx.seed("seed", a.train.seed);
  cfg.options = train_options(a.train, cfg.seed, d);
  if (a.train.mode != "all") cfg.mode = codoc::parse_input_mode(a.train.mode);
  cfg.parallel = a.parallel;
  if (!a.binary.empty()) cfg.binary_target = parse_label(a.binary);
  return cfg;
}

void add_crossval_options(CLI::App* sub, CrossvalCmd& a) {
  add_data_options(sub, a.data);
  add_train_options(sub, a.train);
  sub->add_option("--k", a.k, "Folds")->check(CLI::Range(2, 1000));
  sub->add_option("--binary", a.binary, "Binary variant for this class")->check(CLI::IsMember({"SOURCE", "SINK"}));
  sub->add_flag("--parallel", a.parallel, "Train folds on separate threads");
  sub->add_option("-o,--output", a.output, "JSON report (default stdout)");
}

void run_crossval_cmd(Context& ctx, const CrossvalCmd& a) {
  ctx.set_command("crossval");
  const auto data = load_data(ctx, a.data);
  const auto cfg = crossval_config(ctx, a, data.dataset);
  ctx.set_config(cfg.to_json());
  write_json(ctx, a.output, codoc::run_crossval(data.dataset, cfg).to_json());
}

void run_ablate(Context& ctx, const CrossvalCmd& a) {
  ctx.set_command("ablate");
  const auto data = load_data(ctx, a.data);
  auto cfg = crossval_config(ctx, a, data.dataset);
  ctx.set_config(cfg.to_json());
  if (a.train.mode != "all") {
    write_json(ctx, a.output, codoc::run_ablation(data.dataset, cfg.mode, cfg).to_json());
    return;
  }
  nlohmann::json out;
  std::map<codoc::InputMode, codoc::CrossvalReport> reports;
  for (auto mode : {codoc::InputMode::Both, codoc::InputMode::DocOnly, codoc::InputMode::CodeOnly}) {
    reports.emplace(mode, codoc::run_ablation(data.dataset, mode, cfg));
    out["runs"][codoc::to_string(mode)] = reports.at(mode).to_json();
    out["summary"][codoc::to_string(mode)] = reports.at(mode).summary.to_json();
  }
  auto labels_of = [](const codoc::CrossvalReport& r) {
    std::vector<Label> v;
    for (const auto& p : r.predictions) v.push_back(p.label);
    return v;
  };
  const auto& doc_only = reports.at(codoc::InputMode::DocOnly);
  const auto doc_pred = labels_of(doc_only);
  const auto code_pred = labels_of(reports.at(codoc::InputMode::CodeOnly));
  for (Label l : kAllLabels)
    out["complementarity"]["doc-only vs code-only"][std::string(to_string(l))] =
        codoc::complementarity(doc_pred, code_pred, doc_only.truth, l).to_json();
  write_json(ctx, a.output, out);
}

struct PredictCmd {
  std::string model;
  std::string doc;
  std::string code;
  std::string baseline;
  std::string corpus;
  std::string output;
};

void run_predict(Context& ctx, const PredictCmd& a) {
  ctx.set_command("predict");
  std::vector<PredictionRow> rows;
  if (!a.baseline.empty()) {
    if (a.corpus.empty()) throw ConfigError("--baseline needs --corpus");
    const auto model = susi::baseline_from_json(nlohmann::json::parse(ctx.read_input(a.baseline)));
    ctx.set_config({{"kind", "signature-baseline"}, {"features", model.spec.to_json()}});
    auto corpus = load_corpus(ctx, a.corpus);
    std::sort(corpus.begin(), corpus.end(), [](const auto& x, const auto& y) { return x.signature < y.signature; });
    for (const auto& r : corpus) {
      const auto p = susi::predict_baseline(model, susi::extract_features(r, model.spec));
      rows.push_back({r.signature, p.label, p.probs});
    }
  } else {
    if (a.model.empty() || a.doc.empty() || a.code.empty())
      throw ConfigError("predict needs --model, --doc and --code (or --baseline and --corpus)");
    const auto j = nlohmann::json::parse(ctx.read_input(a.model));
    const auto model = codoc::model_from_json(j);
    ctx.set_config({{"model", model.config.to_json()}, {"mode", codoc::to_string(model.mode)}});
    const auto doc = load_vectors(ctx, a.doc, model.config.doc_dim);
    const auto code = load_vectors(ctx, a.code, model.config.code_dim);
    std::map<std::string, Label> all;
    for (const auto& [sig, v] : doc) all.emplace(sig, Label::Neither);
    const auto d = build_dataset(all, doc, code);
    std::vector<std::size_t> idx(d.examples.size());
    std::iota(idx.begin(), idx.end(), 0);
    const auto preds = codoc::predict(model, d, idx);
    for (std::size_t i = 0; i < idx.size(); ++i)
      rows.push_back({d.examples[i].signature, preds[i].label, preds[i].probs});
  }
  ctx.set_output_root(a.output);
  ctx.write_output(a.output, format_predictions_csv(rows));
  std::array<std::size_t, kNumLabels> counts{};
  for (const auto& r : rows) ++counts[index_of(r.label)];
  ctx.out() << nlohmann::json{{"predictions", rows.size()},
                              {"SOURCE", counts[0]},
                              {"SINK", counts[1]},
                              {"NEITHER", counts[2]}}
                   .dump()
            << '\n';
}

struct TrainBaselineCmd {
  std::string labels;
  std::string corpus;
  std::string rater;
  std::string output;
  std::uint64_t seed = 0;
  int epochs = 0;
  double lr = 0;
};

void run_train_baseline(Context& ctx, const TrainBaselineCmd& a, const CLI::App& sub) {
  ctx.set_command("train-baseline");
  const auto labels = resolve_labels(parse_labels_csv(ctx.read_input(a.labels)), a.rater);
  susi::BaselineConfig cfg;
  if (sub.count("--epochs")) cfg.train.epochs = a.epochs;
  if (sub.count("--lr")) cfg.train.learning_rate = a.lr;
  cfg.train.seed = ctx.seed("seed", a.seed);
  cfg.validate();
  ctx.set_config(cfg.to_json());
  std::vector<std::vector<double>> x;
  std::vector<Label> y;
  for (const auto& r : load_corpus(ctx, a.corpus)) {
    const auto it = labels.find(r.signature);
    if (it == labels.end()) continue;
    x.push_back(susi::extract_features(r));
    y.push_back(it->second);
  }
  if (x.size() != labels.size())
    throw FormatError(std::to_string(labels.size() - x.size()) + " labelled signatures are missing from the corpus");
  const auto result = susi::train_baseline(x, y, cfg);
  ctx.set_output_root(a.output);
  ctx.write_output(a.output, susi::to_json(result.model).dump() + "\n");
  ctx.out() << nlohmann::json{{"examples", x.size()}, {"epochLosses", result.epoch_losses}}.dump() << '\n';
}

}  // namespace

void register_model_commands(CLI::App& app, Context& ctx) {
  {
    auto a = std::make_shared<TrainCmd>();
    auto* sub = app.add_subcommand("train", "Train the dual-branch classifier on all labelled examples");
    add_data_options(sub, a->data);
    add_train_options(sub, a->train);
    sub->add_option("--mode", a->train.mode)->check(CLI::IsMember({"both", "doc-only", "code-only"}));
    sub->add_option("-o,--output", a->output, "Model JSON")->required();
    sub->callback([&ctx, a] { run_train(ctx, *a); });
  }
  {
    auto a = std::make_shared<CrossvalCmd>();
    auto* sub = app.add_subcommand("crossval", "Stratified k-fold cross-validation");
    add_crossval_options(sub, *a);
    sub->add_option("--mode", a->train.mode)->check(CLI::IsMember({"both", "doc-only", "code-only"}));
    sub->callback([&ctx, a] { run_crossval_cmd(ctx, *a); });
  }
  {
    auto a = std::make_shared<CrossvalCmd>();
    auto* sub = app.add_subcommand("ablate", "Cross-validation with one input branch zeroed");
    add_crossval_options(sub, *a);
    sub->add_option("--mode", a->train.mode)->required()->check(CLI::IsMember({"both", "doc-only", "code-only", "all"}));
    sub->callback([&ctx, a] { run_ablate(ctx, *a); });
  }
  {
    auto a = std::make_shared<PredictCmd>();
    auto* sub = app.add_subcommand("predict", "Write a predictions CSV from a classifier or the signature baseline");
    sub->add_option("--model", a->model, "Classifier model JSON");
    sub->add_option("--doc", a->doc);
    sub->add_option("--code", a->code);
    sub->add_option("--baseline", a->baseline, "Baseline model JSON");
    sub->add_option("--corpus", a->corpus, "Corpus for the baseline");
    sub->add_option("-o,--output", a->output, "Predictions CSV")->required();
    sub->callback([&ctx, a] { run_predict(ctx, *a); });
  }
  {
    auto a = std::make_shared<TrainBaselineCmd>();
    auto* sub = app.add_subcommand("train-baseline", "Train the signature-feature baseline");
    sub->add_option("--labels", a->labels)->required();
    sub->add_option("--corpus", a->corpus)->required();
    sub->add_option("--rater", a->rater);
    sub->add_option("--seed", a->seed);
    sub->add_option("--epochs", a->epochs)->check(CLI::NonNegativeNumber);
    sub->add_option("--lr", a->lr);
    sub->add_option("-o,--output", a->output, "Baseline model JSON")->required();
    sub->callback([&ctx, a, sub] { run_train_baseline(ctx, *a, *sub); });
  }
}

}  // namespace apisift::cli
