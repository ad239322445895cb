#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace apisift {

/// Modifiers tracked on a method header.
enum class Modifier { Public, Private, Protected, Static, Abstract, Native, Final, Synchronized };

std::string_view to_string(Modifier m);
std::optional<Modifier> parse_modifier(std::string_view s);

/// Where a method's documentation came from.
struct DocOrigin {
  /// Empty when the method documents itself; otherwise the fully-qualified
  /// supertype whose declaration supplied the text.
  std::string inherited_from;

  bool is_self() const { return inherited_from.empty(); }
  std::string to_string() const;
  static DocOrigin parse(std::string_view s);
  bool operator==(const DocOrigin&) const = default;
};

struct MethodDecl {
  std::string name;
  std::vector<std::string> params;  // type names, whitespace-free, generics kept
  std::string return_type;
  std::set<Modifier> modifiers;
  std::optional<std::string> body;  // verbatim "{ ... }", absent for abstract/native
  std::optional<std::string> doc;   // cleaned doc comment text
  std::vector<std::string> type_params;
  std::size_t line = 0;
};

struct ClassDecl {
  std::string fqcn;
  bool is_interface = false;
  std::vector<std::string> type_params;
  std::vector<std::string> supertypes;  // as written, type arguments erased
  std::vector<MethodDecl> methods;
};

struct SourceUnit {
  std::string package;
  std::vector<std::string> imports;  // qualified names, may end in ".*"
  std::vector<ClassDecl> classes;    // nested classes flattened, outer first
};

/// Parses one compilation unit of the supported Java subset: package and
/// import headers, class and interface declarations (nested ones included)
/// with extends/implements clauses, fields, methods with block bodies and
/// `/** ... */` doc comments. Annotations are skipped; constructors and
/// initializer blocks are consumed but not reported.
SourceUnit parse_unit(std::string_view text);

/// Supertype edges and documented headers for a set of units, keyed by
/// fully-qualified type name.
class TypeHierarchy {
 public:
  struct Header {
    std::string name;
    /// Erased parameter types; a type variable of the class or method is
    /// recorded as "?" and matches any type.
    std::vector<std::string> erased_params;
    std::optional<std::string> doc;
  };

  /// Resolves every supertype name against the units (explicit imports, same
  /// package, wildcard imports, then unique simple name). Unresolvable names
  /// are kept verbatim and have no supertypes. Throws FormatError on cycles.
  static TypeHierarchy build(const std::vector<SourceUnit>& units);

  void add_type(const std::string& fqcn, std::vector<std::string> supertypes, std::vector<Header> methods);

  /// Declared supertypes in declaration order; empty for unknown types.
  const std::vector<std::string>& supertypes(const std::string& fqcn) const;
  const std::vector<Header>& methods(const std::string& fqcn) const;
  bool contains(const std::string& fqcn) const { return edges_.contains(fqcn); }

  /// Throws FormatError if any type reaches itself through supertype edges.
  void check_acyclic() const;

 private:
  std::map<std::string, std::vector<std::string>> edges_;
  std::map<std::string, std::vector<Header>> methods_;
};

struct ResolvedDoc {
  std::string text;
  DocOrigin origin;
};

/// Erases type arguments and package qualifiers: "java.util.List<String>"
/// becomes "List". Used to match overriding headers.
std::string erase_type(std::string_view type);

/// Own documentation if present, else the documentation of the nearest
/// supertype declaring a method with the same name and erased parameter
/// types, searched breadth-first in declaration order.
std::optional<ResolvedDoc> resolve_documentation(const std::string& declaring_type, const MethodDecl& m,
                                                 const TypeHierarchy& h);

struct MethodRecord {
  std::string fqcn;
  std::string name;
  std::vector<std::string> params;
  std::string return_type;
  std::set<Modifier> modifiers;
  std::string body;
  std::optional<std::string> doc;
  std::optional<DocOrigin> doc_origin;
  std::string signature;

  bool operator==(const MethodRecord&) const = default;
};

/// "fqcn#name(p1,p2):ret"
std::string make_signature(std::string_view fqcn, std::string_view name, const std::vector<std::string>& params,
                           std::string_view return_type);

/// Public, documented (directly or through a supertype) and implemented
/// methods, sorted by signature. Throws FormatError on duplicate signatures.
std::vector<MethodRecord> select_candidates(const std::vector<SourceUnit>& units, const TypeHierarchy& h);

struct DocLengthStats {
  std::size_t count = 0;
  double mean_words = 0.0;
  double median_words = 0.0;
  std::size_t bucket_width = 10;
  /// histogram[i] counts docs with word count in [i*w, (i+1)*w); the last
  /// bucket is open-ended.
  std::vector<std::size_t> histogram;
};

/// Number of whitespace-separated words after removing doc markup.
std::size_t doc_word_count(std::string_view doc);

DocLengthStats corpus_stats(const std::vector<MethodRecord>& records, std::size_t bucket_width = 10,
                            std::size_t max_buckets = 30);

nlohmann::json to_json(const MethodRecord& r);
MethodRecord method_record_from_json(const nlohmann::json& j);
nlohmann::json to_json(const DocLengthStats& s);

/// Corpus file: one JSON object per line.
std::string write_corpus(const std::vector<MethodRecord>& records);
std::vector<MethodRecord> read_corpus(std::string_view text);

/// Parses every *.java file below `root` (sorted by path) and returns the
/// candidate corpus.
std::vector<MethodRecord> extract_directory(const std::string& root);

}  // namespace apisift
