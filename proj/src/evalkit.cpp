#include "apisift/evalkit.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <boost/math/distributions/normal.hpp>

#include "apisift/error.hpp"
#include "apisift/rng.hpp"

namespace apisift::eval {

std::uint64_t ConfusionMatrix::total() const {
  std::uint64_t t = 0;
  for (const auto& row : counts)
    for (auto c : row) t += c;
  return t;
}

ConfusionMatrix ConfusionMatrix::from(std::span<const Label> truth, std::span<const Label> predicted) {
  if (truth.size() != predicted.size())
    throw LengthMismatch(std::to_string(truth.size()) + " true labels but " + std::to_string(predicted.size()) +
                         " predictions");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < truth.size(); ++i) cm.add(truth[i], predicted[i]);
  return cm;
}

namespace {

double ratio(std::uint64_t num, std::uint64_t den, bool& undefined) {
  undefined = den == 0;
  return undefined ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

MetricsReport metrics(const ConfusionMatrix& cm) {
  MetricsReport r;
  r.total = cm.total();
  std::uint64_t diag = 0;
  for (int k = 0; k < kNumLabels; ++k) {
    const std::uint64_t tp = cm.counts[k][k];
    std::uint64_t predicted = 0, actual = 0;
    for (int j = 0; j < kNumLabels; ++j) {
      predicted += cm.counts[j][k];
      actual += cm.counts[k][j];
    }
    diag += tp;
    ClassMetrics& m = r.per_class[k];
    m.support = actual;
    m.precision = ratio(tp, predicted, m.precision_undefined);
    m.recall = ratio(tp, actual, m.recall_undefined);
    // F1 = 2TP / (2TP + FP + FN), equal to the harmonic mean when defined.
    m.f1 = ratio(2 * tp, predicted + actual, m.f1_undefined);
  }
  bool unused = false;
  r.accuracy = ratio(diag, r.total, unused);
  for (const auto& m : r.per_class) {
    r.macro_precision += m.precision / kNumLabels;
    r.macro_recall += m.recall / kNumLabels;
    r.macro_f1 += m.f1 / kNumLabels;
    if (r.total > 0) {
      const double w = static_cast<double>(m.support) / static_cast<double>(r.total);
      r.weighted_precision += w * m.precision;
      r.weighted_recall += w * m.recall;
      r.weighted_f1 += w * m.f1;
    }
  }
  std::vector<std::vector<std::uint64_t>> table(kNumLabels, std::vector<std::uint64_t>(kNumLabels));
  for (int i = 0; i < kNumLabels; ++i)
    for (int j = 0; j < kNumLabels; ++j) table[i][j] = cm.counts[i][j];
  r.kappa = cohen_kappa(table);
  return r;
}

KappaResult cohen_kappa(const std::vector<std::vector<std::uint64_t>>& table) {
  const std::size_t k = table.size();
  std::vector<double> rows(k, 0.0), cols(k, 0.0);
  double n = 0.0, agree = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    if (table[i].size() != k) throw LengthMismatch("agreement table is not square");
    for (std::size_t j = 0; j < k; ++j) {
      const double c = static_cast<double>(table[i][j]);
      rows[i] += c;
      cols[j] += c;
      n += c;
      if (i == j) agree += c;
    }
  }
  KappaResult r;
  if (n == 0.0) {
    r.degenerate = true;
    return r;
  }
  r.observed = agree / n;
  for (std::size_t i = 0; i < k; ++i) r.expected += (rows[i] / n) * (cols[i] / n);
  // Integer test for p_e == 1: a single category holds every rating of both raters.
  bool all_one = false;
  for (std::size_t i = 0; i < k; ++i) all_one = all_one || (rows[i] == n && cols[i] == n);
  if (all_one) {
    r.degenerate = true;
    r.expected = 1.0;
    r.kappa = r.observed == 1.0 ? 1.0 : 0.0;
    return r;
  }
  r.kappa = (r.observed - r.expected) / (1.0 - r.expected);
  return r;
}

KappaResult cohen_kappa(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size())
    throw LengthMismatch(std::to_string(a.size()) + " ratings vs " + std::to_string(b.size()) + " ratings");
  std::map<int, std::size_t> index;
  for (int x : a) index.emplace(x, 0);
  for (int x : b) index.emplace(x, 0);
  std::size_t next = 0;
  for (auto& [cat, id] : index) id = next++;
  std::vector<std::vector<std::uint64_t>> table(index.size(), std::vector<std::uint64_t>(index.size(), 0));
  for (std::size_t i = 0; i < a.size(); ++i) ++table[index[a[i]]][index[b[i]]];
  return cohen_kappa(table);
}

KappaResult cohen_kappa(std::span<const Label> a, std::span<const Label> b) {
  std::vector<int> ia, ib;
  for (Label l : a) ia.push_back(index_of(l));
  for (Label l : b) ib.push_back(index_of(l));
  return cohen_kappa(std::span<const int>(ia), std::span<const int>(ib));
}

nlohmann::json MetricsReport::to_json() const {
  nlohmann::json classes = nlohmann::json::object();
  for (int k = 0; k < kNumLabels; ++k) {
    const auto& m = per_class[k];
    classes[std::string(to_string(label_at(k)))] = {
        {"precision", m.precision},
        {"recall", m.recall},
        {"f1", m.f1},
        {"support", m.support},
        {"undefined", {{"precision", m.precision_undefined}, {"recall", m.recall_undefined}, {"f1", m.f1_undefined}}}};
  }
  nlohmann::json j = {{"perClass", classes},
                      {"accuracy", accuracy},
                      {"macro", {{"precision", macro_precision}, {"recall", macro_recall}, {"f1", macro_f1}}},
                      {"weighted", {{"precision", weighted_precision}, {"recall", weighted_recall}, {"f1", weighted_f1}}},
                      {"total", total}};
  if (kappa) j["kappa"] = {{"value", kappa->kappa}, {"degenerate", kappa->degenerate}};
  return j;
}

OverlapReport overlap(const std::set<std::string>& a, const std::set<std::string>& b) {
  OverlapReport r;
  r.size_a = a.size();
  r.size_b = b.size();
  for (const auto& s : a) r.both += b.contains(s);
  r.only_a = r.size_a - r.both;
  r.only_b = r.size_b - r.both;
  return r;
}

nlohmann::json OverlapReport::to_json() const {
  return {{"sizeA", size_a}, {"sizeB", size_b}, {"both", both}, {"onlyA", only_a}, {"onlyB", only_b}};
}

std::vector<std::string> sample_for_review(const std::vector<std::string>& list, std::size_t n, std::uint64_t seed) {
  std::vector<std::string> pool(list);
  std::sort(pool.begin(), pool.end());
  pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
  if (n > pool.size())
    throw ConfigError("cannot sample " + std::to_string(n) + " of " + std::to_string(pool.size()) + " entries");
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) std::swap(pool[i], pool[i + static_cast<std::size_t>(rng.below(pool.size() - i))]);
  pool.resize(n);
  std::sort(pool.begin(), pool.end());
  return pool;
}

SampleSizeCheck required_sample_size(std::size_t population, std::size_t sample, double confidence, double margin,
                                     double p) {
  if (population == 0) throw ConfigError("population must be non-empty");
  if (!(confidence > 0.0 && confidence < 1.0)) throw ConfigError("confidence must be in (0, 1)");
  if (!(margin > 0.0 && margin < 1.0)) throw ConfigError("margin must be in (0, 1)");
  if (!(p > 0.0 && p < 1.0)) throw ConfigError("proportion must be in (0, 1)");
  SampleSizeCheck r;
  r.z = boost::math::quantile(boost::math::normal(), 1.0 - (1.0 - confidence) / 2.0);
  r.infinite_population = r.z * r.z * p * (1.0 - p) / (margin * margin);
  r.corrected = r.infinite_population / (1.0 + (r.infinite_population - 1.0) / static_cast<double>(population));
  r.required = static_cast<std::size_t>(std::ceil(r.corrected));
  r.sample = sample;
  r.sufficient = sample >= r.required;
  return r;
}

nlohmann::json SampleSizeCheck::to_json() const {
  return {{"z", z},           {"infinitePopulation", infinite_population},
          {"corrected", corrected}, {"required", required},
          {"sample", sample}, {"sufficient", sufficient}};
}

}  // namespace apisift::eval
