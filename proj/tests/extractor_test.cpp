#include <gtest/gtest.h>

#include <chrono>
#include <filesystem>
#include <map>
#include <set>

#include "apisift/error.hpp"
#include "apisift/extractor.hpp"
#include "apisift/rng.hpp"
#include "apisift/text.hpp"

using namespace apisift;

namespace {

std::size_t method_count(const SourceUnit& u) {
  std::size_t n = 0;
  for (const auto& c : u.classes) n += c.methods.size();
  return n;
}

std::vector<MethodRecord> candidates_of(const std::vector<std::string>& sources) {
  std::vector<SourceUnit> units;
  for (const auto& s : sources) units.push_back(parse_unit(s));
  return select_candidates(units, TypeHierarchy::build(units));
}

}  // namespace

TEST(ParseUnit, EmptyClass) {
  const auto u = parse_unit("class A {}");
  ASSERT_EQ(u.classes.size(), 1u);
  EXPECT_EQ(u.classes[0].fqcn, "A");
  EXPECT_EQ(method_count(u), 0u);
}

TEST(ParseUnit, CountsEveryMethodKind) {
  const auto u = parse_unit(R"(
    package p;
    public abstract class A {
      /** First. */
      public int a() { return 1; }
      /** Second. */
      public void b(String s) { s.trim(); }
      private void c() {}
      /** Abstract. */
      public abstract void d();
    })");
  ASSERT_EQ(method_count(u), 4u);
  const auto& ms = u.classes[0].methods;
  EXPECT_TRUE(ms[2].modifiers.contains(Modifier::Private));
  EXPECT_FALSE(ms[3].body.has_value());
  EXPECT_TRUE(ms[3].modifiers.contains(Modifier::Abstract));
  EXPECT_EQ(u.classes[0].fqcn, "p.A");
}

TEST(ParseUnit, AttachesDocComment) {
  const auto u = parse_unit("class A {\n/** Returns the id. */\npublic int getId(){return id;}\n}");
  ASSERT_EQ(method_count(u), 1u);
  const auto& m = u.classes[0].methods[0];
  EXPECT_EQ(m.doc, "Returns the id.");
  EXPECT_EQ(m.body, "{return id;}");
  EXPECT_EQ(m.return_type, "int");
}

TEST(ParseUnit, DocSeparatedByBlankLinesStillAttaches) {
  const auto u = parse_unit("class A {\n/** Doc. */\n\n\n@Override\npublic int f(){return 0;}\n}");
  EXPECT_EQ(u.classes[0].methods[0].doc, "Doc.");
}

TEST(ParseUnit, DocDoesNotCrossAMember) {
  const auto u = parse_unit("class A {\n/** Field doc. */ int x;\npublic int f(){return 0;}\n}");
  EXPECT_FALSE(u.classes[0].methods[0].doc.has_value());
}

TEST(ParseUnit, MultiLineDocIsCleaned) {
  const auto u = parse_unit("class A {\n  /**\n   * Line one.\n   *\n   * @return x\n   */\n  int f(){return 0;}\n}");
  EXPECT_EQ(u.classes[0].methods[0].doc, "Line one.\n\n@return x");
}

TEST(ParseUnit, HeadersWithGenericsArraysAndVarargs) {
  const auto u = parse_unit(R"(
    import java.util.*;
    class A<K, V extends Comparable<V>> extends B<K> implements C, D<Map<K, V>> {
      public <T> Map<String, List<T>> f(final int[] xs, @Nullable T t, String... rest) throws E, F { return null; }
      int g()[] { return null; }
    })");
  const auto& c = u.classes[0];
  EXPECT_EQ(c.supertypes, (std::vector<std::string>{"B", "C", "D"}));
  EXPECT_EQ(c.type_params, (std::vector<std::string>{"K", "V"}));
  const auto& f = c.methods[0];
  EXPECT_EQ(f.return_type, "Map<String,List<T>>");
  EXPECT_EQ(f.params, (std::vector<std::string>{"int[]", "T", "String..."}));
  EXPECT_EQ(f.type_params, (std::vector<std::string>{"T"}));
  EXPECT_EQ(c.methods[1].return_type, "int[]");
}

TEST(ParseUnit, NestedClassesAreFlattened) {
  const auto u = parse_unit("package p; class A { static class B { void f() {} } void g() {} }");
  ASSERT_EQ(u.classes.size(), 2u);
  EXPECT_EQ(u.classes[1].fqcn, "p.A.B");
  EXPECT_EQ(u.classes[0].methods.size(), 1u);
  EXPECT_EQ(u.classes[1].methods.size(), 1u);
}

TEST(ParseUnit, InterfaceMethodsAreImplicitlyPublic) {
  const auto u = parse_unit("interface I { void a(); default void b() {} static int c() { return 0; } }");
  const auto& ms = u.classes[0].methods;
  EXPECT_TRUE(ms[0].modifiers.contains(Modifier::Public));
  EXPECT_TRUE(ms[0].modifiers.contains(Modifier::Abstract));
  EXPECT_FALSE(ms[1].modifiers.contains(Modifier::Abstract));
  EXPECT_TRUE(ms[1].body.has_value());
  EXPECT_FALSE(ms[2].modifiers.contains(Modifier::Abstract));
}

TEST(ParseUnit, FieldsWithInitializersAndAnonymousClasses) {
  const auto u = parse_unit(R"(
    class A {
      private final Runnable r = new Runnable() { public void run() { int x = 1; } };
      int[] xs = {1, 2, 3};
      static { System.loadLibrary("x"); }
      void f() {}
    })");
  ASSERT_EQ(u.classes[0].methods.size(), 1u);
  EXPECT_EQ(u.classes[0].methods[0].name, "f");
}

TEST(ParseUnit, MalformedInputReportsLocation) {
  try {
    parse_unit("class A {\n  void f( {\n}");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW(parse_unit("class A { void f() { "), ParseError);
  EXPECT_THROW(parse_unit("enum E { A, B }"), ParseError);
  EXPECT_THROW(parse_unit("class A { String s = \"open; }"), ParseError);
  EXPECT_THROW(parse_unit("class A { /* never closed }"), ParseError);
}

TEST(ResolveDocumentation, OwnDocWins) {
  const auto units = std::vector{parse_unit(R"(
    interface I { /** Parent. */ int f(); }
    class C implements I { /** Own. */ public int f() { return 0; } })")};
  const auto h = TypeHierarchy::build(units);
  const auto doc = resolve_documentation("C", units[0].classes[1].methods[0], h);
  ASSERT_TRUE(doc);
  EXPECT_EQ(doc->text, "Own.");
  EXPECT_TRUE(doc->origin.is_self());
}

TEST(ResolveDocumentation, InheritsFromInterface) {
  const auto units = std::vector{parse_unit(R"(
    package p;
    interface I { /** Parent. */ int f(String s); }
    class C implements I { public int f(java.lang.String other) { return 0; } })")};
  const auto h = TypeHierarchy::build(units);
  const auto doc = resolve_documentation("p.C", units[0].classes[1].methods[0], h);
  ASSERT_TRUE(doc);
  EXPECT_EQ(doc->text, "Parent.");
  EXPECT_EQ(doc->origin.inherited_from, "p.I");
  EXPECT_EQ(doc->origin.to_string(), "inherited(p.I)");
}

TEST(ResolveDocumentation, NoneWhenNothingDocumented) {
  const auto units = std::vector{parse_unit(R"(
    interface I { int f(); }
    class C implements I { public int f() { return 0; } })")};
  const auto h = TypeHierarchy::build(units);
  EXPECT_FALSE(resolve_documentation("C", units[0].classes[1].methods[0], h));
}

TEST(ResolveDocumentation, OverloadsDoNotMatch) {
  const auto units = std::vector{parse_unit(R"(
    interface I { /** Parent. */ int f(int x); }
    class C implements I { public int f(long x) { return 0; } })")};
  const auto h = TypeHierarchy::build(units);
  EXPECT_FALSE(resolve_documentation("C", units[0].classes[1].methods[0], h));
}

TEST(ResolveDocumentation, DeclarationOrderBreaksTies) {
  const auto units = std::vector{parse_unit(R"(
    interface I { /** From I. */ void f(); }
    interface J { /** From J. */ void f(); }
    class B { /** From B. */ public void f() {} }
    class C extends B implements J, I { public void f() {} })")};
  const auto h = TypeHierarchy::build(units);
  const auto doc = resolve_documentation("C", units[0].classes[3].methods[0], h);
  ASSERT_TRUE(doc);
  EXPECT_EQ(doc->origin.inherited_from, "B");
}

TEST(TypeHierarchy, UnknownTypesHaveNoSupertypes) {
  const auto h = TypeHierarchy::build({parse_unit("class A extends Missing {}")});
  EXPECT_EQ(h.supertypes("A"), (std::vector<std::string>{"Missing"}));
  EXPECT_TRUE(h.supertypes("Missing").empty());
  EXPECT_TRUE(h.supertypes("Nowhere").empty());
}

TEST(TypeHierarchy, CyclesAreRejected) {
  EXPECT_THROW(TypeHierarchy::build({parse_unit("class A extends B {} class B extends A {}")}), FormatError);
}

TEST(TypeHierarchy, ResolvesThroughImports) {
  const auto units = std::vector{parse_unit("package a; public class Base {}"),
                                 parse_unit("package b; import a.Base; class D extends Base {}"),
                                 parse_unit("package c; import a.*; class E extends Base {}")};
  const auto h = TypeHierarchy::build(units);
  EXPECT_EQ(h.supertypes("b.D"), (std::vector<std::string>{"a.Base"}));
  EXPECT_EQ(h.supertypes("c.E"), (std::vector<std::string>{"a.Base"}));
}

TEST(SelectCandidates, SixMethodFixture) {
  const auto records = candidates_of({R"(
    package p;
    public abstract class A {
      /** One. */ public int one() { return 1; }
      /** Two. */ public int two() { return 2; }
      /** Abstract. */ public abstract int three();
      public int four() { return 4; }
      /** Private. */ private int five() { return 5; }
      private int six() { return 6; }
    })"});
  ASSERT_EQ(records.size(), 2u);
  EXPECT_EQ(records[0].signature, "p.A#one():int");
  EXPECT_EQ(records[1].signature, "p.A#two():int");
}

TEST(SelectCandidates, EmptyCorpus) { EXPECT_TRUE(candidates_of({}).empty()); }

TEST(SelectCandidates, InheritedDocIsIncluded) {
  const auto records = candidates_of({"interface I { /** Doc. */ int f(); }",
                                      "public class C implements I { public int f() { return 0; } }"});
  ASSERT_EQ(records.size(), 1u);
  EXPECT_EQ(records[0].doc, "Doc.");
  EXPECT_EQ(records[0].doc_origin->inherited_from, "I");
}

TEST(SelectCandidates, SignatureIsWhitespaceFree) {
  const auto records =
      candidates_of({"class C { /** D. */ public java.util.Map < String , Integer > f(int [] a) { return null; } }"});
  ASSERT_EQ(records.size(), 1u);
  EXPECT_EQ(records[0].signature, "C#f(int[]):java.util.Map<String,Integer>");
}

TEST(CorpusStats, HandComputed) {
  auto rec = [](std::size_t words) {
    MethodRecord r;
    std::string doc;
    for (std::size_t i = 0; i < words; ++i) doc += (i ? " w" : "w");
    r.doc = doc;
    return r;
  };
  const auto s = corpus_stats({rec(10), rec(32), rec(200)});
  EXPECT_EQ(s.count, 3u);
  EXPECT_NEAR(s.mean_words, 80.67, 0.01);
  EXPECT_EQ(s.median_words, 32.0);
  std::size_t total = 0;
  for (auto b : s.histogram) total += b;
  EXPECT_EQ(total, 3u);
}

TEST(CorpusStats, EvenCountUsesLowerMiddle) {
  std::vector<MethodRecord> rs(4);
  rs[0].doc = "a";
  rs[1].doc = "a b";
  rs[2].doc = "a b c";
  rs[3].doc = "a b c d";
  EXPECT_EQ(corpus_stats(rs).median_words, 2.0);
}

TEST(CorpusStats, EmptyDoc) {
  MethodRecord r;
  r.doc = "";
  const auto s = corpus_stats({r});
  EXPECT_EQ(s.mean_words, 0.0);
  EXPECT_EQ(s.median_words, 0.0);
}

TEST(CorpusStats, WordCountStripsMarkupAndUnicodeSpaces) {
  EXPECT_EQ(doc_word_count("Returns the {@link Location}."), 3u);
  EXPECT_EQ(doc_word_count("<p>Hello</p> world again"), 3u);
  EXPECT_EQ(doc_word_count("@return the id"), 2u);
}

TEST(CorpusFile, JsonLinesRoundTrip) {
  const auto records = candidates_of({"interface I { /** Doc. */ int f(); }",
                                      "public class C implements I { public int f() { return 0; }\n"
                                      "/** Own \"quoted\". */ public static String g(int a) { return \"x\"; } }"});
  const std::string text = write_corpus(records);
  EXPECT_EQ(read_corpus(text), records);
  const auto j = nlohmann::json::parse(split_lines(text)[0]);
  EXPECT_EQ(j.at("docOrigin"), "inherited(I)");
  EXPECT_EQ(j.at("modifiers"), nlohmann::json::array({"public"}));

  MethodRecord undocumented = records[0];
  undocumented.doc.reset();
  undocumented.doc_origin.reset();
  EXPECT_TRUE(to_json(undocumented).at("docText").is_null());
  EXPECT_THROW(read_corpus(text + text), FormatError);
}

TEST(Fixtures, CorpusMatchesHandEnumeration) {
  const auto start = std::chrono::steady_clock::now();
  const auto records = extract_directory(APISIFT_FIXTURES "/corpus");
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::vector<std::string> expected;
  for (const auto& line : split_lines(read_file(APISIFT_FIXTURES "/corpus_expected.txt")))
    if (!line.empty()) expected.push_back(line);
  std::vector<std::string> got;
  for (const auto& r : records) got.push_back(r.signature);
  EXPECT_EQ(got, expected);
  EXPECT_LT(secs, 1.0);

  std::map<std::string, std::string> origins;
  for (const auto& r : records) origins[r.signature] = r.doc_origin->to_string();
  EXPECT_EQ(origins["android.app.Activity#getSystemService(String):Object"], "inherited(android.content.Context)");
  EXPECT_EQ(origins["android.util.Rational#compareTo(Rational):int"], "inherited(java.lang.Comparable)");
  EXPECT_EQ(origins["android.util.Rational#intValue():int"], "self");
}

// ---------------------------------------------------------------------------
// Properties

namespace {

// Renders parsed headers back to Java source with canonical spacing.
void render_class(const SourceUnit& u, std::size_t index, std::string& out) {
  const auto& c = u.classes[index];
  out += (c.is_interface ? "interface " : "class ") + c.fqcn.substr(c.fqcn.rfind('.') + 1) + " {\n";
  for (std::size_t k = index + 1; k < u.classes.size(); ++k) {
    const auto& inner = u.classes[k].fqcn;
    if (inner.starts_with(c.fqcn + ".") && inner.find('.', c.fqcn.size() + 1) == std::string::npos)
      render_class(u, k, out);
  }
  {
    for (const auto& m : c.methods) {
      if (m.doc) out += "/** " + *m.doc + " */\n";
      for (auto mod : m.modifiers) {
        if (c.is_interface && (mod == Modifier::Public || mod == Modifier::Abstract)) continue;
        out += std::string(to_string(mod)) + " ";
      }
      out += m.return_type + " " + m.name + "(";
      for (std::size_t i = 0; i < m.params.size(); ++i) out += (i ? ", " : "") + m.params[i] + " p" + std::to_string(i);
      out += ")";
      out += m.body ? " " + *m.body + "\n" : ";\n";
    }
  }
  out += "}\n";
}

std::string render_unit(const SourceUnit& u) {
  std::string out;
  if (!u.package.empty()) out += "package " + u.package + ";\n";
  for (std::size_t i = 0; i < u.classes.size(); ++i) {
    const auto& f = u.classes[i].fqcn;
    const std::string local = u.package.empty() ? f : f.substr(u.package.size() + 1);
    if (local.find('.') == std::string::npos) render_class(u, i, out);
  }
  return out;
}

std::vector<std::tuple<std::string, std::string, std::vector<std::string>, std::string, std::set<Modifier>>>
identities(const SourceUnit& u) {
  std::vector<std::tuple<std::string, std::string, std::vector<std::string>, std::string, std::set<Modifier>>> out;
  for (const auto& c : u.classes)
    for (const auto& m : c.methods) out.emplace_back(c.fqcn, m.name, m.params, m.return_type, m.modifiers);
  return out;
}

// Random class hierarchy rendered as Java. Type i may extend/implement only
// types with a smaller index, so the hierarchy is acyclic.
struct RandomCorpus {
  std::vector<std::string> sources;
};

RandomCorpus random_corpus(Rng& rng, int types) {
  RandomCorpus rc;
  const std::vector<std::string> names{"f", "g", "h"};
  const std::vector<std::string> params{"", "int x", "String s"};
  for (int t = 0; t < types; ++t) {
    std::string src = "package q;\n";
    const bool iface = rng.below(3) == 0;
    src += std::string(iface ? "interface" : "class") + " T" + std::to_string(t);
    std::vector<int> sups;
    for (int s = 0; s < t; ++s)
      if (rng.below(3) == 0) sups.push_back(s);
    if (!sups.empty()) {
      src += " extends ";
      for (std::size_t i = 0; i < sups.size(); ++i) src += (i ? ", T" : "T") + std::to_string(sups[i]);
    }
    src += " {\n";
    for (const auto& n : names) {
      for (const auto& p : params) {
        if (rng.below(4) != 0) continue;
        if (rng.below(2) == 0) src += "/** Doc of " + n + " in T" + std::to_string(t) + ". */\n";
        const char* vis = rng.below(4) == 0 ? "private " : "public ";
        src += std::string(iface ? "" : vis) + "int " + n + "(" + p + ") { return 0; }\n";
      }
    }
    src += "}\n";
    rc.sources.push_back(std::move(src));
  }
  return rc;
}

}  // namespace

TEST(ExtractorProperties, RenderThenReparseKeepsIdentities) {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    for (const auto& src : random_corpus(rng, 5).sources) {
      const auto u1 = parse_unit(src);
      const auto u2 = parse_unit(render_unit(u1));
      EXPECT_EQ(identities(u1), identities(u2)) << src;
    }
  }
  for (const auto& f : std::filesystem::recursive_directory_iterator(APISIFT_FIXTURES "/corpus")) {
    if (!f.is_regular_file()) continue;
    const auto u1 = parse_unit(read_file(f.path().string()));
    EXPECT_EQ(identities(u1), identities(parse_unit(render_unit(u1)))) << f.path();
  }
}

TEST(ExtractorProperties, CandidatesSatisfyAllPredicates) {
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<SourceUnit> units;
    for (const auto& s : random_corpus(rng, 6).sources) units.push_back(parse_unit(s));
    const auto h = TypeHierarchy::build(units);
    const auto records = select_candidates(units, h);
    std::set<std::string> expected;
    for (const auto& u : units) {
      for (const auto& c : u.classes) {
        for (const auto& m : c.methods) {
          const bool pub = m.modifiers.contains(Modifier::Public);
          const bool impl = m.body && !m.modifiers.contains(Modifier::Abstract);
          if (pub && impl && resolve_documentation(c.fqcn, m, h))
            expected.insert(make_signature(c.fqcn, m.name, m.params, m.return_type));
        }
      }
    }
    std::set<std::string> got;
    for (const auto& r : records) {
      got.insert(r.signature);
      EXPECT_TRUE(r.modifiers.contains(Modifier::Public));
      EXPECT_TRUE(r.doc.has_value());
      EXPECT_FALSE(r.modifiers.contains(Modifier::Abstract));
    }
    EXPECT_EQ(got, expected);
  }
}

TEST(ExtractorProperties, InheritedDocComesFromNearestDocumentedAncestor) {
  Rng rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<SourceUnit> units;
    for (const auto& s : random_corpus(rng, 7).sources) units.push_back(parse_unit(s));
    const auto h = TypeHierarchy::build(units);

    // Shortest supertype distance by repeated relaxation over all edges.
    std::map<std::string, std::map<std::string, int>> dist;
    for (const auto& u : units)
      for (const auto& c : u.classes) dist[c.fqcn][c.fqcn] = 0;
    for (bool changed = true; changed;) {
      changed = false;
      for (auto& [t, ds] : dist) {
        for (const auto& s : h.supertypes(t)) {
          for (const auto& [anc, d] : std::map<std::string, int>(dist[s])) {
            auto it = ds.find(anc);
            if (it == ds.end() || it->second > d + 1) {
              ds[anc] = d + 1;
              changed = true;
            }
          }
        }
      }
    }

    for (const auto& u : units) {
      for (const auto& c : u.classes) {
        for (const auto& m : c.methods) {
          if (m.doc) continue;
          int best = -1;
          for (const auto& [anc, d] : dist[c.fqcn]) {
            if (d == 0) continue;
            for (const auto& hd : h.methods(anc)) {
              if (hd.doc && hd.name == m.name && hd.erased_params.size() == m.params.size() &&
                  (m.params.empty() || hd.erased_params[0] == erase_type(m.params[0]))) {
                if (best < 0 || d < best) best = d;
              }
            }
          }
          const auto doc = resolve_documentation(c.fqcn, m, h);
          ASSERT_EQ(doc.has_value(), best >= 0);
          if (!doc) continue;
          ASSERT_TRUE(dist[c.fqcn].contains(doc->origin.inherited_from));
          EXPECT_EQ(dist[c.fqcn][doc->origin.inherited_from], best);
        }
      }
    }
  }
}
