#include <filesystem>

#include "apisift/error.hpp"
#include "apisift/evalkit.hpp"
#include "apisift/tables.hpp"
#include "apisift/taint.hpp"
#include "context.hpp"

namespace apisift::cli {

namespace {

nlohmann::json kappa_json(const std::vector<Label>& a, const std::vector<Label>& b) {
  const auto k = eval::cohen_kappa(a, b);
  eval::ConfusionMatrix table;
  for (std::size_t i = 0; i < a.size(); ++i) table.add(a[i], b[i]);
  return {{"n", a.size()},          {"kappa", k.kappa},           {"observed", k.observed},
          {"expected", k.expected}, {"degenerate", k.degenerate}, {"confusion", table.counts}};
}

struct CompareCmd {
  std::string a;
  std::string b;
  std::string labels;
  std::string rater;
  std::string output;
};

void run_compare(Context& ctx, const CompareCmd& c) {
  ctx.set_command("compare");
  const auto pa = parse_predictions_csv(ctx.read_input(c.a));
  const auto pb = parse_predictions_csv(ctx.read_input(c.b));
  std::map<std::string, Label> la, lb;
  for (const auto& r : pa) la[r.signature] = r.label;
  for (const auto& r : pb) lb[r.signature] = r.label;
  nlohmann::json out;
  for (Label l : kAllLabels) {
    std::set<std::string> sa, sb;
    for (const auto& [s, x] : la)
      if (x == l) sa.insert(s);
    for (const auto& [s, x] : lb)
      if (x == l) sb.insert(s);
    out["overlap"][std::string(to_string(l))] = eval::overlap(sa, sb).to_json();
  }
  if (!c.labels.empty()) {
    const auto truth_map = resolve_labels(parse_labels_csv(ctx.read_input(c.labels)), c.rater);
    std::vector<Label> truth, ya, yb;
    for (const auto& [sig, t] : truth_map) {
      const auto ia = la.find(sig), ib = lb.find(sig);
      if (ia == la.end() || ib == lb.end()) continue;
      truth.push_back(t), ya.push_back(ia->second), yb.push_back(ib->second);
    }
    out["evaluated"] = truth.size();
    out["metricsA"] = eval::metrics(eval::ConfusionMatrix::from(truth, ya)).to_json();
    out["metricsB"] = eval::metrics(eval::ConfusionMatrix::from(truth, yb)).to_json();
    for (Label l : kAllLabels)
      out["complementarity"][std::string(to_string(l))] = codoc::complementarity(ya, yb, truth, l).to_json();
  }
  write_json(ctx, c.output, out);
}

struct KappaCmd {
  std::vector<std::string> files;
  std::string rater_a;
  std::string rater_b;
  std::string output;
};

void run_kappa(Context& ctx, const KappaCmd& c) {
  ctx.set_command("kappa");
  std::map<std::string, Label> a, b;
  std::string name_a = c.rater_a, name_b = c.rater_b;
  if (c.files.size() == 2) {
    a = resolve_labels(parse_labels_csv(ctx.read_input(c.files[0])), c.rater_a);
    b = resolve_labels(parse_labels_csv(ctx.read_input(c.files[1])), c.rater_b);
    if (name_a.empty()) name_a = c.files[0];
    if (name_b.empty()) name_b = c.files[1];
  } else {
    const auto rows = parse_labels_csv(ctx.read_input(c.files[0]));
    std::set<std::string> raters;
    for (const auto& r : rows) raters.insert(r.rater);
    if (name_a.empty() && name_b.empty()) {
      if (raters.size() != 2)
        throw ConfigError("a single labels file needs exactly two raters or --rater-a/--rater-b (found " +
                          std::to_string(raters.size()) + ")");
      name_a = *raters.begin();
      name_b = *raters.rbegin();
    }
    if (name_a.empty() || name_b.empty()) throw ConfigError("give both --rater-a and --rater-b");
    a = resolve_labels(rows, name_a);
    b = resolve_labels(rows, name_b);
  }
  std::vector<Label> ya, yb;
  for (const auto& [sig, l] : a)
    if (auto it = b.find(sig); it != b.end()) ya.push_back(l), yb.push_back(it->second);
  auto j = kappa_json(ya, yb);
  j["raters"] = {name_a, name_b};
  write_json(ctx, c.output, j);
}

struct SampleCmd {
  std::string preds;
  std::string label = "SOURCE";
  std::size_t n = 100;
  std::uint64_t seed = 0;
  double confidence = 0.95;
  double margin = 0.10;
  std::string output;
};

void run_sample(Context& ctx, const SampleCmd& c) {
  ctx.set_command("sample");
  const Label target = *parse_label(c.label);
  std::vector<std::string> population;
  for (const auto& r : parse_predictions_csv(ctx.read_input(c.preds)))
    if (r.label == target) population.push_back(r.signature);
  const std::uint64_t seed = ctx.seed("seed", c.seed);
  ctx.set_config({{"label", c.label}, {"n", c.n}, {"confidence", c.confidence}, {"margin", c.margin}});
  const auto sample = eval::sample_for_review(population, c.n, seed);
  const auto check = population.empty() ? nlohmann::json(nullptr)
                                        : eval::required_sample_size(population.size(), c.n, c.confidence, c.margin)
                                              .to_json();
  if (!c.output.empty()) {
    std::string text;
    for (const auto& s : sample) text += s + "\n";
    ctx.set_output_root(c.output);
    ctx.write_output(c.output, text);
  }
  ctx.out() << nlohmann::json{{"population", population.size()}, {"sample", sample}, {"sampleSize", check}}.dump(2)
            << '\n';
}

struct TaintCmd {
  std::string programs;
  std::string sources;
  std::string sinks;
  std::string reduced;
  std::string output;
};

void run_taint(Context& ctx, const TaintCmd& c) {
  namespace fs = std::filesystem;
  ctx.set_command("taint");
  const auto sources = taint::parse_signature_list(ctx.read_input(c.sources));
  const auto sinks = taint::parse_signature_list(ctx.read_input(c.sinks));
  if (fs::is_directory(c.programs))
    for (const auto& e : fs::recursive_directory_iterator(c.programs))
      if (e.is_regular_file() && e.path().extension() == ".prog") ctx.read_input(e.path());
  const auto programs = taint::load_programs(c.programs);
  const auto flows = taint::propagate_corpus(programs, sources, sinks);
  std::vector<taint::Flow> plain;
  for (const auto& f : flows) plain.push_back(f.flow);
  const auto reduced = taint::reduce_lists(plain, sources, sinks);
  ctx.set_output_root(c.output);
  ctx.write_output(c.output, taint::format_flows_csv(flows));
  if (!c.reduced.empty()) {
    auto join = [](const std::set<std::string>& s) {
      std::string t;
      for (const auto& x : s) t += x + "\n";
      return t;
    };
    ctx.write_output(fs::path(c.reduced) / "sources.txt", join(reduced.sources));
    ctx.write_output(fs::path(c.reduced) / "sinks.txt", join(reduced.sinks));
  }
  ctx.out() << nlohmann::json{{"programs", programs.size()},
                              {"flows", flows.size()},
                              {"sources", sources.size()},
                              {"sinks", sinks.size()},
                              {"usedSources", reduced.sources.size()},
                              {"usedSinks", reduced.sinks.size()}}
                   .dump()
            << '\n';
}

struct ReportCmd {
  std::string flows;
  std::string oracle;
  std::string output;
};

nlohmann::json shares_json(const std::vector<taint::SigShare>& v) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& s : v) out.push_back({{"signature", s.sig}, {"count", s.count}, {"share", s.share}});
  return out;
}

nlohmann::json fp_json(const taint::FpRate& r) {
  return {{"truePositives", r.true_positives},
          {"falsePositives", r.false_positives},
          {"fpRate", r.rate},
          {"undefined", r.undefined}};
}

void run_report(Context& ctx, const ReportCmd& c) {
  ctx.set_command("report");
  const auto flows = taint::parse_flows_csv(ctx.read_input(c.flows));
  std::vector<taint::Flow> plain;
  std::set<std::string> used_sources, used_sinks;
  for (const auto& f : flows) {
    plain.push_back(f.flow);
    used_sources.insert(f.flow.source_sig);
    used_sinks.insert(f.flow.sink_sig);
  }
  const auto report = taint::flow_report(plain);
  nlohmann::json out{{"flows", report.total},
                     {"sources", shares_json(report.sources)},
                     {"sinks", shares_json(report.sinks)}};
  if (!c.oracle.empty()) {
    std::map<std::string, bool> oracle;
    for (const auto& [sig, tp] : taint::parse_oracle_csv(ctx.read_input(c.oracle)))
      if (auto [it, inserted] = oracle.emplace(taint::callee_key(sig), tp); !inserted && it->second != tp)
        throw FormatError("conflicting verdicts for overloads of '" + it->first + "'");
    out["sourceFp"] = fp_json(taint::fp_rate(used_sources, oracle));
    out["sinkFp"] = fp_json(taint::fp_rate(used_sinks, oracle));
  }
  write_json(ctx, c.output, out);
}

}  // namespace

void register_analysis_commands(CLI::App& app, Context& ctx) {
  {
    auto a = std::make_shared<CompareCmd>();
    auto* sub = app.add_subcommand("compare", "Overlap and complementarity of two prediction files");
    sub->add_option("predsA", a->a)->required();
    sub->add_option("predsB", a->b)->required();
    sub->add_option("--labels", a->labels, "Ground-truth labels CSV");
    sub->add_option("--rater", a->rater);
    sub->add_option("-o,--output", a->output, "JSON report (default stdout)");
    sub->callback([&ctx, a] { run_compare(ctx, *a); });
  }
  {
    auto a = std::make_shared<KappaCmd>();
    auto* sub = app.add_subcommand("kappa", "Cohen's kappa between two raters");
    sub->add_option("files", a->files, "One labels CSV with two raters, or two labels CSVs")
        ->required()
        ->expected(1, 2);
    sub->add_option("--rater-a", a->rater_a);
    sub->add_option("--rater-b", a->rater_b);
    sub->add_option("-o,--output", a->output, "JSON report (default stdout)");
    sub->callback([&ctx, a] { run_kappa(ctx, *a); });
  }
  {
    auto a = std::make_shared<SampleCmd>();
    auto* sub = app.add_subcommand("sample", "Seeded review sample of one predicted class");
    sub->add_option("preds", a->preds)->required();
    sub->add_option("--label", a->label)->check(CLI::IsMember({"SOURCE", "SINK", "NEITHER"}));
    sub->add_option("--n", a->n);
    sub->add_option("--seed", a->seed);
    sub->add_option("--confidence", a->confidence);
    sub->add_option("--margin", a->margin);
    sub->add_option("-o,--output", a->output, "Sampled signatures, one per line");
    sub->callback([&ctx, a] { run_sample(ctx, *a); });
  }
  {
    auto a = std::make_shared<TaintCmd>();
    auto* sub = app.add_subcommand("taint", "Propagate taint through a directory of .prog programs");
    sub->add_option("--programs", a->programs)->required();
    sub->add_option("--sources", a->sources)->required();
    sub->add_option("--sinks", a->sinks)->required();
    sub->add_option("--reduced", a->reduced, "Directory for the reduced source and sink lists");
    sub->add_option("-o,--output", a->output, "Flows CSV")->required();
    sub->callback([&ctx, a] { run_taint(ctx, *a); });
  }
  {
    auto a = std::make_shared<ReportCmd>();
    auto* sub = app.add_subcommand("report", "Flow shares and false-positive rates of the used lists");
    sub->add_option("flows", a->flows)->required();
    sub->add_option("--oracle", a->oracle, "signature,verdict CSV (TP/FP)");
    sub->add_option("-o,--output", a->output, "JSON report (default stdout)");
    sub->callback([&ctx, a] { run_report(ctx, *a); });
  }
}

}  // namespace apisift::cli
