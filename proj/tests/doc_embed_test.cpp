#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "apisift/doc_embed.hpp"
#include "apisift/error.hpp"
#include "apisift/rng.hpp"
#include "apisift/vector_store.hpp"

using namespace apisift;
using namespace apisift::doc;

namespace {

using Tokens = std::vector<std::string>;

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double ab = 0, aa = 0, bb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) ab += a[i] * b[i], aa += a[i] * a[i], bb += b[i] * b[i];
  return ab / std::sqrt(aa * bb);
}

double sparse_cosine(const std::map<std::size_t, double>& a, const std::map<std::size_t, double>& b) {
  double ab = 0, aa = 0, bb = 0;
  for (const auto& [k, v] : a) {
    aa += v * v;
    if (auto it = b.find(k); it != b.end()) ab += v * it->second;
  }
  for (const auto& [k, v] : b) bb += v * v;
  return ab / std::sqrt(aa * bb);
}

std::string unit_line(const std::string& sig, std::size_t dim, double value = 0.5) {
  return format_vector_line({sig, std::vector<double>(dim, value)}) + "\n";
}

}  // namespace

TEST(NormalizeDoc, PlainSentence) { EXPECT_EQ(normalize_doc("Returns the IMEI."), (Tokens{"returns", "the", "imei"})); }

TEST(NormalizeDoc, MarkupRemovedPayloadKept) {
  EXPECT_EQ(normalize_doc("@return the {@link Location} object"), (Tokens{"the", "location", "object"}));
  EXPECT_EQ(normalize_doc("<p>Gets the <b>device</b> id.</p>"), (Tokens{"gets", "the", "device", "id"}));
  EXPECT_EQ(normalize_doc("@param sms the message"), (Tokens{"sms", "the", "message"}));
}

TEST(NormalizeDoc, EmptyAndPunctuationOnly) {
  EXPECT_TRUE(normalize_doc("").empty());
  EXPECT_TRUE(normalize_doc(" .,;-- ").empty());
}

TEST(NormalizeDoc, StripTagsCanBeDisabled) {
  EXPECT_EQ(normalize_doc("@return x", false), (Tokens{"return", "x"}));
  EXPECT_EQ(normalize_doc("<b>x</b>", false), (Tokens{"b", "x", "b"}));
}

TEST(NormalizeDoc, NonAsciiBytesStayInTokens) {
  EXPECT_EQ(normalize_doc("Caf\xC3\xA9 ok"), (Tokens{"caf\xC3\xA9", "ok"}));
}

TEST(EmbedDoc, DeterministicAndUnitNorm) {
  const DocPipelineConfig cfg;
  const Tokens t{"returns", "the", "device", "id"};
  const auto a = embed_doc(t, cfg);
  const auto b = embed_doc(t, cfg);
  EXPECT_EQ(a.values, b.values);
  ASSERT_EQ(a.values.size(), kDocDim);
  double n = 0;
  for (double v : a.values) n += v * v;
  EXPECT_NEAR(std::sqrt(n), 1.0, 1e-6);
  EXPECT_FALSE(a.zero_doc);
}

TEST(EmbedDoc, EmptyIsZeroWithFlag) {
  const auto v = embed_doc({}, DocPipelineConfig{});
  EXPECT_TRUE(v.zero_doc);
  EXPECT_EQ(v.values, std::vector<double>(kDocDim, 0.0));
}

TEST(EmbedDoc, SeedChangesProjection) {
  DocPipelineConfig a, b;
  b.projection_seed = 1;
  EXPECT_NE(embed_doc({"x", "y"}, a).values, embed_doc({"x", "y"}, b).values);
}

TEST(EmbedDoc, InvalidConfig) {
  DocPipelineConfig c;
  c.hash_buckets = 767;
  EXPECT_THROW(embed_doc({"x"}, c), ConfigError);
  c = {};
  c.nonzeros = 0;
  EXPECT_THROW(embed_doc({"x"}, c), ConfigError);
}

TEST(EmbedDoc, IdfWeightsTerms) {
  DocPipelineConfig c;
  c.hash_buckets = 1 << 12;
  c.idf = std::map<std::string, double>{{"the", 0.1}, {"imei", 5.0}};
  const auto tf = hashed_tf({"the", "imei", "unknown"}, c);
  double total = 0;
  for (const auto& [k, v] : tf) total += v;
  EXPECT_DOUBLE_EQ(total, 6.1);
}

TEST(EmbedDoc, ProjectionColumnsHaveDistinctRows) {
  const DocPipelineConfig cfg;
  for (std::size_t b = 0; b < 500; ++b) {
    const auto col = projection_column(b, cfg);
    ASSERT_EQ(col.size(), cfg.nonzeros);
    std::set<std::size_t> rows;
    for (const auto& [r, s] : col) {
      rows.insert(r);
      EXPECT_NEAR(std::abs(s), 1.0 / std::sqrt(8.0), 1e-15);
    }
    EXPECT_EQ(rows.size(), cfg.nonzeros);
  }
}

TEST(DocEmbedProperties, TokenOrderInvariance) {
  Rng rng(4);
  const DocPipelineConfig cfg;
  for (int trial = 0; trial < 100; ++trial) {
    Tokens t;
    for (std::uint64_t i = 0, n = 1 + rng.below(30); i < n; ++i) t.push_back("w" + std::to_string(rng.below(50)));
    Tokens shuffled = t;
    rng.shuffle(shuffled);
    EXPECT_EQ(embed_doc(t, cfg).values, embed_doc(shuffled, cfg).values);
  }
}

TEST(DocEmbedProperties, DuplicatingTokensLeavesVectorUnchanged) {
  Rng rng(5);
  const DocPipelineConfig cfg;
  for (int trial = 0; trial < 100; ++trial) {
    Tokens t;
    for (std::uint64_t i = 0, n = 1 + rng.below(30); i < n; ++i) t.push_back("w" + std::to_string(rng.below(50)));
    Tokens twice = t;
    twice.insert(twice.end(), t.begin(), t.end());
    EXPECT_EQ(embed_doc(t, cfg).values, embed_doc(twice, cfg).values);
  }
}

TEST(DocEmbedProperties, ProjectionPreservesCosine) {
  Rng rng(6);
  const DocPipelineConfig cfg;
  std::vector<Tokens> bags;
  for (int i = 0; i < 50; ++i) {
    Tokens t;
    // A shared vocabulary of 60 words gives a spread of true similarities.
    for (std::uint64_t k = 0, n = 5 + rng.below(40); k < n; ++k) t.push_back("w" + std::to_string(rng.below(60)));
    bags.push_back(t);
  }
  double worst = 0;
  for (std::size_t i = 0; i < bags.size(); ++i)
    for (std::size_t j = i + 1; j < bags.size(); ++j) {
      const double exact = sparse_cosine(hashed_tf(bags[i], cfg), hashed_tf(bags[j], cfg));
      const double projected = cosine(embed_doc(bags[i], cfg).values, embed_doc(bags[j], cfg).values);
      worst = std::max(worst, std::abs(exact - projected));
    }
  EXPECT_LE(worst, 0.15);
}

TEST(ComputeIdf, SmoothedFormula) {
  const auto idf = compute_idf({{"a", "b"}, {"a"}, {"a", "c", "c"}});
  EXPECT_DOUBLE_EQ(idf.at("a"), std::log(4.0 / 4.0) + 1.0);
  EXPECT_DOUBLE_EQ(idf.at("c"), std::log(4.0 / 2.0) + 1.0);
}

TEST(ExternalVectors, ThreeValidRows) {
  const auto m = load_external_vectors(unit_line("a#f():int", 768) + unit_line("a#g():int", 768) + "\n" +
                                       unit_line("b#h():void", 768));
  ASSERT_EQ(m.size(), 3u);
  double n = 0;
  for (double v : m.at("a#g():int").values) n += v * v;
  EXPECT_NEAR(n, 1.0, 1e-12);
}

TEST(ExternalVectors, WrongWidthRejected) {
  EXPECT_THROW(load_external_vectors(unit_line("a#f():int", 767)), FormatError);
}

TEST(ExternalVectors, DuplicateSignatureRejected) {
  EXPECT_THROW(load_external_vectors(unit_line("a#f():int", 768) + unit_line("a#f():int", 768)), FormatError);
}

TEST(ExternalVectors, BadFloatRejected) {
  std::string line = unit_line("a#f():int", 768);
  line.replace(line.find("0.5"), 3, "\"x\"");
  EXPECT_THROW(load_external_vectors(line), FormatError);
  EXPECT_THROW(load_external_vectors("{\"sig\": \"a\", \"vec\": [1, 2,\n"), FormatError);
}

TEST(ExternalVectors, ErrorNamesTheLine) {
  try {
    load_external_vectors(unit_line("a", 768) + unit_line("b", 3));
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
}

TEST(ExternalVectors, WriteThenLoadRoundTrip) {
  Rng rng(8);
  std::vector<VectorRow> rows;
  for (int i = 0; i < 20; ++i) {
    Tokens t;
    for (int k = 0; k < 10; ++k) t.push_back("w" + std::to_string(rng.below(100)));
    rows.push_back({"p.C#m" + std::to_string(i) + "():void", embed_doc(t, DocPipelineConfig{}).values});
  }
  const auto m = load_external_vectors(format_vectors(rows));
  for (const auto& r : rows)
    for (std::size_t k = 0; k < kDocDim; ++k) EXPECT_NEAR(m.at(r.sig).values[k], r.vec[k], 1e-7);
  EXPECT_EQ(parse_vectors(format_vectors(rows)), rows);
}
