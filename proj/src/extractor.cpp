#include "apisift/extractor.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include "apisift/error.hpp"
#include "apisift/java_lexer.hpp"
#include "apisift/text.hpp"

namespace apisift {

using java::Token;
using java::TokenKind;

std::string_view to_string(Modifier m) {
  switch (m) {
    case Modifier::Public: return "public";
    case Modifier::Private: return "private";
    case Modifier::Protected: return "protected";
    case Modifier::Static: return "static";
    case Modifier::Abstract: return "abstract";
    case Modifier::Native: return "native";
    case Modifier::Final: return "final";
    case Modifier::Synchronized: return "synchronized";
  }
  return "";
}

std::optional<Modifier> parse_modifier(std::string_view s) {
  for (auto m : {Modifier::Public, Modifier::Private, Modifier::Protected, Modifier::Static, Modifier::Abstract,
                 Modifier::Native, Modifier::Final, Modifier::Synchronized}) {
    if (to_string(m) == s) return m;
  }
  return std::nullopt;
}

std::string DocOrigin::to_string() const {
  return is_self() ? std::string("self") : "inherited(" + inherited_from + ")";
}

DocOrigin DocOrigin::parse(std::string_view s) {
  if (s == "self") return {};
  if (s.starts_with("inherited(") && s.ends_with(")") && s.size() > 11) {
    return DocOrigin{std::string(s.substr(10, s.size() - 11))};
  }
  throw FormatError("bad docOrigin '" + std::string(s) + "'");
}

namespace {

// Modifier keywords accepted on members but not tracked in MethodRecord.
bool is_untracked_modifier(std::string_view s) {
  return s == "default" || s == "strictfp" || s == "transient" || s == "volatile";
}

class UnitParser {
 public:
  explicit UnitParser(std::string_view text) : text_(text), ts_(java::tokenize(text)) {}

  SourceUnit run() {
    SourceUnit unit;
    skip_annotations();
    if (is_word("package")) {
      next();
      unit.package = qualified_name();
      expect(";");
    }
    while (is_word("import")) {
      next();
      if (is_word("static")) next();
      std::string name = qualified_name();
      if (is(".")) {
        next();
        expect("*");
        name += ".*";
      }
      expect(";");
      unit.imports.push_back(std::move(name));
    }
    package_ = unit.package;
    while (!at_end()) {
      if (is(";")) {
        next();
        continue;
      }
      parse_type_decl(unit, "");
    }
    return unit;
  }

 private:
  const Token& cur() const { return ts_.tokens[pos_]; }
  const Token& look(std::size_t k) const { return ts_.tokens[std::min(pos_ + k, ts_.tokens.size() - 1)]; }
  bool at_end() const { return cur().kind == TokenKind::End; }
  bool is(std::string_view p) const { return cur().kind == TokenKind::Punct && cur().text == p; }
  bool is_word(std::string_view w) const {
    return (cur().kind == TokenKind::Keyword || cur().kind == TokenKind::Identifier) && cur().text == w;
  }
  const Token& next() { return ts_.tokens[at_end() ? pos_ : pos_++]; }

  [[noreturn]] void fail(const std::string& msg) const {
    const Token& t = cur();
    throw ParseError(msg + (t.kind == TokenKind::End ? " at end of input" : " near '" + t.text + "'"), t.line,
                     t.column);
  }

  void expect(std::string_view p) {
    if (!is(p)) fail("expected '" + std::string(p) + "'");
    next();
  }

  std::string identifier() {
    if (cur().kind != TokenKind::Identifier) fail("expected identifier");
    return next().text;
  }

  std::string qualified_name() {
    std::string name = identifier();
    while (is(".") && look(1).kind == TokenKind::Identifier) {
      next();
      name += "." + next().text;
    }
    return name;
  }

  // Skips a balanced bracket group starting at the current opener.
  void skip_balanced(std::string_view open, std::string_view close) {
    if (!is(open)) fail("expected '" + std::string(open) + "'");
    int depth = 0;
    do {
      if (at_end()) fail("unbalanced '" + std::string(open) + "'");
      if (is(open)) ++depth;
      if (is(close)) --depth;
      next();
    } while (depth > 0);
  }

  void skip_annotations() {
    while (is("@") && !(look(1).text == "interface")) {
      next();
      qualified_name();
      if (is("(")) skip_balanced("(", ")");
    }
  }

  // Type arguments are consumed as raw text; ">>" closes two levels.
  std::string type_arguments() {
    std::string out;
    int depth = 0;
    do {
      if (at_end()) fail("unterminated type arguments");
      const std::string& t = cur().text;
      if (cur().kind == TokenKind::Punct) {
        if (t == "<") ++depth;
        else if (t == ">") --depth;
        else if (t == ">>") depth -= 2;
        else if (t == ">>>") depth -= 3;
        else if (t != "," && t != "." && t != "?" && t != "[" && t != "]" && t != "&" && t != "@")
          fail("unexpected token in type arguments");
      } else if (t == "extends" || t == "super") {
        out += ' ';
        out += t;
        out += ' ';
        next();
        continue;
      }
      out += t;
      next();
    } while (depth > 0);
    if (depth < 0) fail("unbalanced type arguments");
    return out;
  }

  std::string type() {
    skip_annotations();
    std::string out;
    if (cur().kind == TokenKind::Keyword && (java::is_primitive_type(cur().text) || cur().text == "void")) {
      out = next().text;
    } else {
      out = identifier();
      if (is("<")) out += type_arguments();
      while (is(".") && look(1).kind == TokenKind::Identifier) {
        next();
        out += "." + next().text;
        if (is("<")) out += type_arguments();
      }
    }
    while (is("[") && look(1).text == "]") {
      next();
      next();
      out += "[]";
    }
    return out;
  }

  std::vector<std::string> type_list() {
    std::vector<std::string> out{erase_generics(type())};
    while (is(",")) {
      next();
      out.push_back(erase_generics(type()));
    }
    return out;
  }

  // "<T extends Comparable<T>, U>" -> {T, U}
  static std::vector<std::string> type_param_names(const std::string& raw) {
    std::vector<std::string> out;
    int depth = 0;
    bool expect_name = false;
    std::string cur;
    for (char c : raw) {
      if ((c == '<' || c == ',' || c == '>') && !cur.empty() && expect_name) {
        out.push_back(std::move(cur));
        cur.clear();
      }
      if (c == '<' || c == ',') {
        if (c == '<') ++depth;
        expect_name = depth == 1;
        continue;
      }
      if (c == '>') {
        --depth;
        expect_name = false;
        continue;
      }
      if (expect_name) {
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$') {
          cur += c;
        } else if (!cur.empty()) {
          out.push_back(std::move(cur));
          cur.clear();
          expect_name = false;
        }
      }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
  }

  static std::string erase_generics(const std::string& t) {
    std::string out;
    int depth = 0;
    for (char c : t) {
      if (c == '<') ++depth;
      else if (c == '>') --depth;
      else if (depth == 0) out += c;
    }
    return out;
  }

  // Doc attached to the member whose header spans [from, pos_): the last doc
  // comment seen before one of its header tokens.
  std::optional<std::string> doc_for(std::size_t from) const {
    std::optional<std::size_t> found;
    for (std::size_t i = from; i < pos_; ++i) {
      if (ts_.tokens[i].doc) found = ts_.tokens[i].doc;
    }
    if (!found) return std::nullopt;
    return java::clean_doc_comment(ts_.docs[*found].raw);
  }

  struct Modifiers {
    std::set<Modifier> tracked;
  };

  Modifiers modifiers() {
    Modifiers m;
    while (true) {
      skip_annotations();
      if (cur().kind != TokenKind::Keyword && !(cur().kind == TokenKind::Identifier && cur().text == "sealed"))
        break;
      if (auto mod = parse_modifier(cur().text)) {
        m.tracked.insert(*mod);
        next();
      } else if (is_untracked_modifier(cur().text)) {
        next();
      } else {
        break;
      }
    }
    return m;
  }

  void parse_type_decl(SourceUnit& unit, const std::string& outer) {
    modifiers();
    bool is_interface = false;
    if (is_word("class")) {
      next();
    } else if (is_word("interface")) {
      is_interface = true;
      next();
    } else if (is("@") && look(1).text == "interface") {
      next();
      next();
      is_interface = true;
    } else if (is_word("enum") || is_word("record")) {
      fail("unsupported type declaration");
    } else {
      fail("expected class or interface declaration");
    }
    const std::string name = identifier();
    ClassDecl decl;
    if (is("<")) decl.type_params = type_param_names(type_arguments());
    decl.is_interface = is_interface;
    if (!outer.empty()) decl.fqcn = outer + "." + name;
    else decl.fqcn = package_.empty() ? name : package_ + "." + name;
    if (is_word("extends")) {
      next();
      auto ext = type_list();
      decl.supertypes.insert(decl.supertypes.end(), ext.begin(), ext.end());
    }
    if (is_word("implements")) {
      next();
      auto impl = type_list();
      decl.supertypes.insert(decl.supertypes.end(), impl.begin(), impl.end());
    }
    if (is_word("permits")) {
      next();
      type_list();
    }
    const std::size_t index = unit.classes.size();
    unit.classes.push_back(std::move(decl));
    parse_class_body(unit, index, name);
  }

  void parse_class_body(SourceUnit& unit, std::size_t index, const std::string& simple_name) {
    expect("{");
    while (!is("}")) {
      if (at_end()) fail("unterminated class body");
      if (is(";")) {
        next();
        continue;
      }
      const std::size_t member_start = pos_;
      const Modifiers mods = modifiers();
      if (is("{")) {  // initializer block
        skip_balanced("{", "}");
        continue;
      }
      if (is_word("class") || is_word("interface") || is_word("enum") || is_word("record") ||
          (is("@") && look(1).text == "interface")) {
        pos_ = member_start;
        const std::string fqcn = unit.classes[index].fqcn;
        parse_type_decl(unit, fqcn);
        continue;
      }
      std::vector<std::string> method_type_params;
      if (is("<")) method_type_params = type_param_names(type_arguments());
      if (cur().kind == TokenKind::Identifier && cur().text == simple_name && look(1).text == "(") {
        next();  // constructor
        skip_balanced("(", ")");
        if (is_word("throws")) {
          next();
          type_list();
        }
        skip_balanced("{", "}");
        continue;
      }
      std::string ret = type();
      const Token& name_tok = cur();
      std::string name = identifier();
      if (is("(")) {
        auto doc = doc_for(member_start);
        MethodDecl m = parse_method_rest(std::move(name), std::move(ret), mods, unit.classes[index].is_interface);
        m.line = name_tok.line;
        m.type_params = std::move(method_type_params);
        m.doc = std::move(doc);
        unit.classes[index].methods.push_back(std::move(m));
      } else {
        skip_field_rest();
      }
    }
    expect("}");
  }

  MethodDecl parse_method_rest(std::string name, std::string ret, const Modifiers& mods, bool in_interface) {
    MethodDecl m;
    m.name = std::move(name);
    m.modifiers = mods.tracked;
    expect("(");
    while (!is(")")) {
      modifiers();  // final, annotations
      std::string t = type();
      if (is("...")) {
        next();
        t += "...";
      }
      identifier();
      while (is("[")) {
        next();
        expect("]");
        t += "[]";
      }
      m.params.push_back(std::move(t));
      if (is(",")) next();
      else if (!is(")")) fail("expected ',' or ')' in parameter list");
    }
    expect(")");
    while (is("[")) {
      next();
      expect("]");
      ret += "[]";
    }
    m.return_type = std::move(ret);
    if (is_word("throws")) {
      next();
      type_list();
    }
    if (is("{")) {
      const std::size_t begin = cur().offset;
      skip_balanced("{", "}");
      const std::size_t end = ts_.tokens[pos_ - 1].end;
      m.body = std::string(text_.substr(begin, end - begin));
    } else if (is_word("default") && in_interface) {
      fail("annotation defaults are not supported");
    } else {
      expect(";");
    }
    if (in_interface) {
      if (!m.modifiers.contains(Modifier::Private)) m.modifiers.insert(Modifier::Public);
      if (!m.body && !m.modifiers.contains(Modifier::Static)) m.modifiers.insert(Modifier::Abstract);
    }
    return m;
  }

  void skip_field_rest() {
    int depth = 0;
    while (true) {
      if (at_end()) fail("unterminated field declaration");
      if (is("{") || is("(") || is("[")) ++depth;
      if (is("}") || is(")") || is("]")) {
        if (depth == 0) fail("unexpected closing bracket in field declaration");
        --depth;
      }
      if (is(";") && depth == 0) {
        next();
        return;
      }
      next();
    }
  }

  std::string_view text_;
  java::TokenStream ts_;
  std::size_t pos_ = 0;
  std::string package_;
};

std::string simple_name(const std::string& fqcn) {
  const auto dot = fqcn.rfind('.');
  return dot == std::string::npos ? fqcn : fqcn.substr(dot + 1);
}

bool params_match(const std::vector<std::string>& declared, const std::vector<std::string>& actual) {
  if (declared.size() != actual.size()) return false;
  for (std::size_t i = 0; i < declared.size(); ++i) {
    if (declared[i] != "?" && declared[i] != actual[i]) return false;
  }
  return true;
}

const std::vector<std::string> kEmptyTypes;
const std::vector<TypeHierarchy::Header> kEmptyHeaders;

}  // namespace

SourceUnit parse_unit(std::string_view text) { return UnitParser(text).run(); }

std::string erase_type(std::string_view type) {
  std::string no_args;
  int depth = 0;
  for (char c : type) {
    if (c == '<') ++depth;
    else if (c == '>') --depth;
    else if (depth == 0 && !std::isspace(static_cast<unsigned char>(c))) no_args += c;
  }
  // Drop the package qualifier but keep array/varargs suffixes.
  std::size_t suffix = no_args.size();
  while (suffix > 0 && (no_args[suffix - 1] == '[' || no_args[suffix - 1] == ']')) --suffix;
  std::string base = no_args.substr(0, suffix);
  std::string tail = no_args.substr(suffix);
  if (base.ends_with("...")) {
    base.resize(base.size() - 3);
    tail = "..." + tail;
  }
  const auto dot = base.rfind('.');
  if (dot != std::string::npos) base = base.substr(dot + 1);
  return base + tail;
}

void TypeHierarchy::add_type(const std::string& fqcn, std::vector<std::string> supertypes,
                             std::vector<Header> methods) {
  edges_[fqcn] = std::move(supertypes);
  methods_[fqcn] = std::move(methods);
}

const std::vector<std::string>& TypeHierarchy::supertypes(const std::string& fqcn) const {
  const auto it = edges_.find(fqcn);
  return it == edges_.end() ? kEmptyTypes : it->second;
}

const std::vector<TypeHierarchy::Header>& TypeHierarchy::methods(const std::string& fqcn) const {
  const auto it = methods_.find(fqcn);
  return it == methods_.end() ? kEmptyHeaders : it->second;
}

void TypeHierarchy::check_acyclic() const {
  // 0 = unvisited, 1 = on stack, 2 = done
  std::map<std::string, int> state;
  std::function<void(const std::string&)> visit = [&](const std::string& t) {
    int& s = state[t];
    if (s == 2) return;
    if (s == 1) throw FormatError("cyclic type hierarchy through " + t);
    s = 1;
    for (const auto& sup : supertypes(t)) visit(sup);
    state[t] = 2;
  };
  for (const auto& [t, _] : edges_) visit(t);
}

TypeHierarchy TypeHierarchy::build(const std::vector<SourceUnit>& units) {
  std::set<std::string> known;
  std::multimap<std::string, std::string> by_simple;
  for (const auto& u : units) {
    for (const auto& c : u.classes) {
      known.insert(c.fqcn);
      by_simple.emplace(simple_name(c.fqcn), c.fqcn);
    }
  }

  auto resolve = [&](const SourceUnit& u, const std::string& raw) -> std::string {
    if (known.contains(raw)) return raw;
    const auto first_dot = raw.find('.');
    const std::string head = raw.substr(0, first_dot);
    const std::string rest = first_dot == std::string::npos ? "" : raw.substr(first_dot);
    for (const auto& imp : u.imports) {
      if (!imp.ends_with(".*") && simple_name(imp) == head && known.contains(imp + rest)) return imp + rest;
    }
    if (!u.package.empty() && known.contains(u.package + "." + raw)) return u.package + "." + raw;
    for (const auto& imp : u.imports) {
      if (imp.ends_with(".*")) {
        const std::string cand = imp.substr(0, imp.size() - 1) + raw;
        if (known.contains(cand)) return cand;
      }
    }
    if (first_dot == std::string::npos) {
      const auto [lo, hi] = by_simple.equal_range(raw);
      if (lo != hi) {
        std::string best = lo->second;
        for (auto it = lo; it != hi; ++it) best = std::min(best, it->second);
        return best;
      }
    }
    return raw;
  };

  TypeHierarchy h;
  for (const auto& u : units) {
    for (const auto& c : u.classes) {
      std::vector<std::string> sups;
      for (const auto& s : c.supertypes) sups.push_back(resolve(u, s));
      std::vector<Header> headers;
      for (const auto& m : c.methods) {
        Header hd{m.name, {}, m.doc};
        for (const auto& p : m.params) {
          std::string e = erase_type(p);
          const auto is_var = [&](const std::vector<std::string>& vars) {
            return std::find(vars.begin(), vars.end(), e) != vars.end();
          };
          hd.erased_params.push_back(is_var(c.type_params) || is_var(m.type_params) ? "?" : std::move(e));
        }
        headers.push_back(std::move(hd));
      }
      h.add_type(c.fqcn, std::move(sups), std::move(headers));
    }
  }
  h.check_acyclic();
  return h;
}

std::optional<ResolvedDoc> resolve_documentation(const std::string& declaring_type, const MethodDecl& m,
                                                 const TypeHierarchy& h) {
  if (m.doc) return ResolvedDoc{*m.doc, DocOrigin{}};
  std::vector<std::string> erased;
  for (const auto& p : m.params) erased.push_back(erase_type(p));

  std::deque<std::string> queue(h.supertypes(declaring_type).begin(), h.supertypes(declaring_type).end());
  std::set<std::string> seen{declaring_type};
  while (!queue.empty()) {
    const std::string t = queue.front();
    queue.pop_front();
    if (!seen.insert(t).second) continue;
    for (const auto& hd : h.methods(t)) {
      if (hd.doc && hd.name == m.name && params_match(hd.erased_params, erased)) return ResolvedDoc{*hd.doc, DocOrigin{t}};
    }
    for (const auto& s : h.supertypes(t)) queue.push_back(s);
  }
  return std::nullopt;
}

std::string make_signature(std::string_view fqcn, std::string_view name, const std::vector<std::string>& params,
                           std::string_view return_type) {
  std::string sig(fqcn);
  sig += '#';
  sig += name;
  sig += '(';
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (i) sig += ',';
    sig += params[i];
  }
  sig += "):";
  sig += return_type;
  sig.erase(std::remove_if(sig.begin(), sig.end(), [](unsigned char c) { return std::isspace(c); }), sig.end());
  return sig;
}

std::vector<MethodRecord> select_candidates(const std::vector<SourceUnit>& units, const TypeHierarchy& h) {
  std::vector<MethodRecord> out;
  for (const auto& u : units) {
    for (const auto& c : u.classes) {
      for (const auto& m : c.methods) {
        if (!m.modifiers.contains(Modifier::Public) || !m.body) continue;
        if (m.modifiers.contains(Modifier::Abstract) || m.modifiers.contains(Modifier::Native)) continue;
        auto doc = resolve_documentation(c.fqcn, m, h);
        if (!doc) continue;
        MethodRecord r;
        r.fqcn = c.fqcn;
        r.name = m.name;
        r.params = m.params;
        r.return_type = m.return_type;
        r.modifiers = m.modifiers;
        r.body = *m.body;
        r.doc = std::move(doc->text);
        r.doc_origin = std::move(doc->origin);
        r.signature = make_signature(r.fqcn, r.name, r.params, r.return_type);
        out.push_back(std::move(r));
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.signature < b.signature; });
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (out[i].signature == out[i - 1].signature) throw FormatError("duplicate signature " + out[i].signature);
  }
  return out;
}

std::size_t doc_word_count(std::string_view doc) { return split_unicode_whitespace(strip_doc_markup(doc)).size(); }

DocLengthStats corpus_stats(const std::vector<MethodRecord>& records, std::size_t bucket_width,
                            std::size_t max_buckets) {
  DocLengthStats s;
  s.bucket_width = std::max<std::size_t>(bucket_width, 1);
  s.histogram.assign(std::max<std::size_t>(max_buckets, 1), 0);
  std::vector<std::size_t> counts;
  for (const auto& r : records) counts.push_back(doc_word_count(r.doc.value_or("")));
  s.count = counts.size();
  if (counts.empty()) return s;
  double total = 0.0;
  for (auto c : counts) {
    total += static_cast<double>(c);
    s.histogram[std::min(c / s.bucket_width, s.histogram.size() - 1)]++;
  }
  s.mean_words = total / static_cast<double>(counts.size());
  std::sort(counts.begin(), counts.end());
  s.median_words = static_cast<double>(counts[(counts.size() - 1) / 2]);
  return s;
}

nlohmann::json to_json(const MethodRecord& r) {
  nlohmann::json mods = nlohmann::json::array();
  for (auto m : r.modifiers) mods.push_back(std::string(to_string(m)));
  return nlohmann::json{{"fqcn", r.fqcn},
                        {"name", r.name},
                        {"params", r.params},
                        {"returnType", r.return_type},
                        {"modifiers", mods},
                        {"bodyText", r.body},
                        {"docText", r.doc ? nlohmann::json(*r.doc) : nlohmann::json(nullptr)},
                        {"docOrigin", r.doc_origin ? nlohmann::json(r.doc_origin->to_string()) : nlohmann::json(nullptr)},
                        {"signature", r.signature}};
}

MethodRecord method_record_from_json(const nlohmann::json& j) {
  try {
    MethodRecord r;
    r.fqcn = j.at("fqcn").get<std::string>();
    r.name = j.at("name").get<std::string>();
    r.params = j.at("params").get<std::vector<std::string>>();
    r.return_type = j.at("returnType").get<std::string>();
    for (const auto& m : j.at("modifiers")) {
      auto mod = parse_modifier(m.get<std::string>());
      if (!mod) throw FormatError("unknown modifier " + m.get<std::string>());
      r.modifiers.insert(*mod);
    }
    r.body = j.at("bodyText").get<std::string>();
    if (!j.at("docText").is_null()) r.doc = j.at("docText").get<std::string>();
    if (j.contains("docOrigin") && !j.at("docOrigin").is_null())
      r.doc_origin = DocOrigin::parse(j.at("docOrigin").get<std::string>());
    r.signature = j.at("signature").get<std::string>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad method record: ") + e.what());
  }
}

nlohmann::json to_json(const DocLengthStats& s) {
  return nlohmann::json{{"count", s.count},
                        {"meanWords", s.mean_words},
                        {"medianWords", s.median_words},
                        {"bucketWidth", s.bucket_width},
                        {"histogram", s.histogram}};
}

std::string write_corpus(const std::vector<MethodRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    out += to_json(r).dump();
    out += '\n';
  }
  return out;
}

std::vector<MethodRecord> read_corpus(std::string_view text) {
  std::vector<MethodRecord> out;
  std::set<std::string> seen;
  std::size_t line_no = 0;
  for (const auto& line : split_lines(text)) {
    ++line_no;
    if (trim(line).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw FormatError("corpus line " + std::to_string(line_no) + ": " + e.what());
    }
    auto r = method_record_from_json(j);
    if (!seen.insert(r.signature).second) throw FormatError("duplicate signature " + r.signature);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<MethodRecord> extract_directory(const std::string& root) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(root)) throw FormatError("not a directory: " + root);
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file() && e.path().extension() == ".java") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<SourceUnit> units;
  for (const auto& f : files) {
    try {
      units.push_back(parse_unit(read_file(f.string())));
    } catch (const ParseError& e) {
      throw ParseError(f.string() + ": " + e.detail(), e.line(), e.column());
    }
  }
  return select_candidates(units, TypeHierarchy::build(units));
}

}  // namespace apisift
