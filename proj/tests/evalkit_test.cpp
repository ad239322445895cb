#include <gtest/gtest.h>

#include <algorithm>

#include "apisift/error.hpp"
#include "apisift/evalkit.hpp"
#include "apisift/rng.hpp"
#include "support/eval_oracle.hpp"

using namespace apisift;
using namespace apisift::eval;

namespace {

ConfusionMatrix make_cm(std::array<std::array<std::uint64_t, 3>, 3> c) {
  ConfusionMatrix cm;
  cm.counts = c;
  return cm;
}

ConfusionMatrix random_cm(Rng& rng) {
  ConfusionMatrix cm;
  for (auto& row : cm.counts)
    for (auto& c : row) c = rng.below(4) == 0 ? 0 : rng.below(1000);
  return cm;
}

}  // namespace

TEST(Metrics, PerfectDiagonal) {
  const auto r = metrics(make_cm({{{4, 0, 0}, {0, 7, 0}, {0, 0, 9}}}));
  for (const auto& m : r.per_class) {
    EXPECT_EQ(m.precision, 1.0);
    EXPECT_EQ(m.recall, 1.0);
    EXPECT_EQ(m.f1, 1.0);
  }
  EXPECT_EQ(r.accuracy, 1.0);
  EXPECT_EQ(r.weighted_f1, 1.0);
  EXPECT_EQ(r.macro_f1, 1.0);
  EXPECT_EQ(r.kappa->kappa, 1.0);
}

TEST(Metrics, HandComputed) {
  const auto r = metrics(make_cm({{{5, 0, 5}, {0, 10, 0}, {0, 0, 10}}}));
  const auto& s = r.per_class[index_of(Label::Source)];
  EXPECT_DOUBLE_EQ(s.recall, 0.5);
  EXPECT_DOUBLE_EQ(s.precision, 1.0);
  EXPECT_DOUBLE_EQ(s.f1, 2.0 / 3.0);
  EXPECT_EQ(s.support, 10u);
  EXPECT_DOUBLE_EQ(r.accuracy, 25.0 / 30.0);
}

TEST(Metrics, ZeroPredictionsFlagged) {
  const auto r = metrics(make_cm({{{5, 0, 0}, {3, 0, 2}, {0, 0, 10}}}));
  const auto& sink = r.per_class[index_of(Label::Sink)];
  EXPECT_EQ(sink.precision, 0.0);
  EXPECT_TRUE(sink.precision_undefined);
  EXPECT_FALSE(sink.recall_undefined);
  EXPECT_EQ(sink.f1, 0.0);
}

TEST(Metrics, EmptyMatrix) {
  const auto r = metrics(ConfusionMatrix{});
  EXPECT_EQ(r.accuracy, 0.0);
  EXPECT_TRUE(r.per_class[0].recall_undefined);
  EXPECT_TRUE(r.kappa->degenerate);
}

TEST(Metrics, FromLabelLists) {
  const std::vector<Label> t{Label::Source, Label::Sink, Label::Neither};
  const std::vector<Label> p{Label::Source, Label::Neither, Label::Neither};
  const auto cm = ConfusionMatrix::from(t, p);
  EXPECT_EQ(cm.counts[1][2], 1u);
  EXPECT_EQ(cm.total(), 3u);
  EXPECT_THROW(ConfusionMatrix::from(t, std::vector<Label>{Label::Sink}), LengthMismatch);
}

TEST(Metrics, MatchesHighPrecisionOracle) {
  Rng rng(101);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto cm = random_cm(rng);
    const auto r = metrics(cm);
    const auto o = oracle::hp_metrics(cm.counts);
    for (int k = 0; k < 3; ++k) {
      EXPECT_NEAR(r.per_class[k].precision, o.cls[k].precision.convert_to<double>(), 1e-9);
      EXPECT_NEAR(r.per_class[k].recall, o.cls[k].recall.convert_to<double>(), 1e-9);
      EXPECT_NEAR(r.per_class[k].f1, o.cls[k].f1.convert_to<double>(), 1e-9);
    }
    EXPECT_NEAR(r.accuracy, o.accuracy.convert_to<double>(), 1e-9);
    EXPECT_NEAR(r.macro_f1, o.macro_f1.convert_to<double>(), 1e-9);
    EXPECT_NEAR(r.weighted_f1, o.weighted_f1.convert_to<double>(), 1e-9);
    EXPECT_NEAR(r.weighted_precision, o.weighted_precision.convert_to<double>(), 1e-9);
    EXPECT_NEAR(r.weighted_recall, o.weighted_recall.convert_to<double>(), 1e-9);
    EXPECT_NEAR(r.kappa->kappa, o.kappa.convert_to<double>(), 1e-9);
  }
}

TEST(MetricsProperties, WeightedF1BetweenPerClassExtremes) {
  Rng rng(7);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto r = metrics(random_cm(rng));
    double lo = 1, hi = 0;
    for (const auto& m : r.per_class)
      if (m.support > 0) lo = std::min(lo, m.f1), hi = std::max(hi, m.f1);
    if (r.total == 0 || lo > hi) continue;
    EXPECT_GE(r.weighted_f1, lo - 1e-12);
    EXPECT_LE(r.weighted_f1, hi + 1e-12);
  }
}

TEST(MetricsProperties, LabelOrderEquivariance) {
  Rng rng(8);
  for (int trial = 0; trial < 300; ++trial) {
    const auto cm = random_cm(rng);
    std::vector<int> perm{0, 1, 2};
    rng.shuffle(perm);
    ConfusionMatrix permuted;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) permuted.counts[perm[i]][perm[j]] = cm.counts[i][j];
    const auto a = metrics(cm);
    const auto b = metrics(permuted);
    for (int k = 0; k < 3; ++k) {
      EXPECT_EQ(a.per_class[k].precision, b.per_class[perm[k]].precision);
      EXPECT_EQ(a.per_class[k].recall, b.per_class[perm[k]].recall);
      EXPECT_EQ(a.per_class[k].f1, b.per_class[perm[k]].f1);
    }
    EXPECT_EQ(a.accuracy, b.accuracy);
    EXPECT_NEAR(a.kappa->kappa, b.kappa->kappa, 1e-12);
  }
}

TEST(Kappa, IdenticalRatingsArePerfect) {
  const std::vector<Label> a{Label::Source, Label::Sink, Label::Neither, Label::Sink};
  EXPECT_EQ(cohen_kappa(a, a).kappa, 1.0);
}

TEST(Kappa, ClosedFormZero) {
  const std::vector<int> a{0, 0, 1, 1}, b{0, 1, 0, 1};
  EXPECT_EQ(cohen_kappa(a, b).kappa, 0.0);
}

TEST(Kappa, IndependentRatersNearZero) {
  Rng rng(99);
  std::vector<int> a, b;
  for (int i = 0; i < 10000; ++i) a.push_back(static_cast<int>(rng.below(3))), b.push_back(static_cast<int>(rng.below(3)));
  EXPECT_LE(std::abs(cohen_kappa(a, b).kappa), 0.05);
}

TEST(Kappa, DegenerateChanceAgreement) {
  const std::vector<int> a{2, 2, 2};
  const auto r = cohen_kappa(a, a);
  EXPECT_TRUE(r.degenerate);
  EXPECT_EQ(r.kappa, 1.0);
}

TEST(Kappa, LengthMismatch) {
  const std::vector<int> a{1, 2}, b{1};
  EXPECT_THROW(cohen_kappa(a, b), LengthMismatch);
}

TEST(Kappa, MatchesHighPrecisionOracleAndIsSymmetric) {
  Rng rng(55);
  for (int trial = 0; trial < 1000; ++trial) {
    const int cats = 2 + static_cast<int>(rng.below(3));
    const std::size_t n = 1 + rng.below(200);
    std::vector<int> a(n), b(n);
    const double agree = rng.uniform();
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = static_cast<int>(rng.below(cats));
      b[i] = rng.uniform() < agree ? a[i] : static_cast<int>(rng.below(cats));
    }
    const double k = cohen_kappa(a, b).kappa;
    EXPECT_NEAR(k, oracle::hp_kappa(a, b, cats).convert_to<double>(), 1e-9);
    EXPECT_EQ(k, cohen_kappa(b, a).kappa);
  }
}

TEST(Overlap, SetAlgebra) {
  EXPECT_EQ(overlap({"a", "b"}, {"c"}).both, 0u);
  const auto sub = overlap({"a"}, {"a", "b"});
  EXPECT_EQ(sub.only_a, 0u);
  EXPECT_EQ(sub.only_b, 1u);
  Rng rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    std::set<std::string> a, b;
    for (std::uint64_t i = 0, n = rng.below(40); i < n; ++i) a.insert("s" + std::to_string(rng.below(50)));
    for (std::uint64_t i = 0, n = rng.below(40); i < n; ++i) b.insert("s" + std::to_string(rng.below(50)));
    std::size_t both = 0, oa = 0, ob = 0;
    for (int k = 0; k < 50; ++k) {
      const std::string s = "s" + std::to_string(k);
      const bool in_a = a.contains(s), in_b = b.contains(s);
      both += in_a && in_b;
      oa += in_a && !in_b;
      ob += in_b && !in_a;
    }
    const auto r = overlap(a, b);
    EXPECT_EQ(r.both, both);
    EXPECT_EQ(r.only_a, oa);
    EXPECT_EQ(r.only_b, ob);
    EXPECT_EQ(r.size_a + r.size_b - r.both, both + oa + ob);
  }
}

TEST(Sample, WholeListWhenNEqualsSize) {
  const std::vector<std::string> l{"c", "a", "b"};
  EXPECT_EQ(sample_for_review(l, 3, 1), (std::vector<std::string>{"a", "b", "c"}));
}

TEST(Sample, SeededSortedAndDistinct) {
  std::vector<std::string> l;
  for (int i = 0; i < 500; ++i) l.push_back("m" + std::to_string(i));
  const auto a = sample_for_review(l, 100, 9);
  EXPECT_EQ(a, sample_for_review(l, 100, 9));
  EXPECT_TRUE(std::is_sorted(a.begin(), a.end()));
  EXPECT_EQ(std::set<std::string>(a.begin(), a.end()).size(), 100u);
  std::vector<std::string> reversed(l.rbegin(), l.rend());
  EXPECT_EQ(a, sample_for_review(reversed, 100, 9));
  EXPECT_NE(a, sample_for_review(l, 100, 10));
  EXPECT_THROW(sample_for_review(l, 501, 1), ConfigError);
}

TEST(Sample, InclusionIsUniform) {
  std::vector<std::string> l;
  for (int i = 0; i < 10; ++i) l.push_back(std::string(1, static_cast<char>('a' + i)));
  std::map<std::string, int> hits;
  for (std::uint64_t s = 0; s < 5000; ++s)
    for (const auto& x : sample_for_review(l, 3, s)) ++hits[x];
  for (const auto& [k, v] : hits) EXPECT_NEAR(v / 5000.0, 0.3, 0.03) << k;
}

TEST(SampleSize, PopulationOf15105) {
  const auto r = required_sample_size(15105, 100, 0.95, 0.10);
  EXPECT_NEAR(r.z, 1.959964, 1e-6);
  EXPECT_NEAR(r.infinite_population, 96.03647, 1e-4);
  EXPECT_LE(r.required, 100u);
  EXPECT_TRUE(r.sufficient);
}

TEST(SampleSize, SmallPopulationNeedsLess) {
  EXPECT_LT(required_sample_size(200).required, required_sample_size(15105).required);
  EXPECT_EQ(required_sample_size(1).required, 1u);
  EXPECT_THROW(required_sample_size(0), ConfigError);
  EXPECT_THROW(required_sample_size(10, 5, 1.5), ConfigError);
}
