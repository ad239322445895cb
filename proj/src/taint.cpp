#include "apisift/taint.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <sstream>

#include "apisift/error.hpp"
#include "apisift/text.hpp"

namespace apisift::taint {

Expr Expr::constant(long long v) {
  Expr e;
  e.kind = Kind::Const;
  e.value = v;
  return e;
}

Expr Expr::variable(std::string name) {
  Expr e;
  e.kind = Kind::Var;
  e.var = std::move(name);
  return e;
}

Expr Expr::binop(char op, Expr lhs, Expr rhs) {
  Expr e;
  e.kind = Kind::Binop;
  e.op = op;
  e.operands.push_back(std::move(lhs));
  e.operands.push_back(std::move(rhs));
  return e;
}

namespace {

constexpr std::string_view kOps = "+-*/%&|^";

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$'; }
bool ident_char(char c) { return ident_start(c) || std::isdigit(static_cast<unsigned char>(c)); }
bool is_keyword(std::string_view s) { return s == "call" || s == "const" || s == "null"; }

class LineParser {
 public:
  LineParser(std::string_view text, std::size_t line, const std::set<std::string>& defined)
      : s_(text), line_(line), defined_(defined) {}

  Statement statement() {
    Statement st;
    st.line = line_;
    skip_ws();
    const std::size_t start = pos_;
    const std::string first = ident("a variable or 'call'");
    if (first == "call") {
      st.kind = Statement::Kind::CallVoid;
      call_tail(st);
    } else {
      if (is_keyword(first)) fail("keyword '" + first + "' cannot be assigned", start);
      expect('=');
      skip_ws();
      const std::size_t rhs = pos_;
      if (peek_word("const")) {
        pos_ += 5;
        st.kind = Statement::Kind::Assign;
        st.expr = Expr::constant(integer());
      } else if (peek_word("call")) {
        pos_ += 4;
        st.kind = Statement::Kind::CallAssign;
        call_tail(st);
      } else {
        pos_ = rhs;
        st.kind = Statement::Kind::Assign;
        st.expr = expression();
      }
      st.target = first;
    }
    expect(';');
    skip_ws();
    if (pos_ < s_.size() && !s_.substr(pos_).starts_with("//")) fail("unexpected text after ';'", pos_);
    return st;
  }

 private:
  [[noreturn]] void fail(const std::string& msg, std::size_t at) const { throw ParseError(msg, line_, at + 1); }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool peek_word(std::string_view w) const {
    return s_.substr(pos_).starts_with(w) && (pos_ + w.size() == s_.size() || !ident_char(s_[pos_ + w.size()]));
  }

  void expect(char c) {
    skip_ws();
    if (pos_ >= s_.size() || s_[pos_] != c) fail(std::string("expected '") + c + "'", pos_);
    ++pos_;
  }

  std::string ident(const char* what) {
    skip_ws();
    if (pos_ >= s_.size() || !ident_start(s_[pos_])) fail(std::string("expected ") + what, pos_);
    const std::size_t start = pos_;
    while (pos_ < s_.size() && ident_char(s_[pos_])) ++pos_;
    return std::string(s_.substr(start, pos_ - start));
  }

  long long integer() {
    skip_ws();
    const std::size_t start = pos_;
    if (pos_ < s_.size() && s_[pos_] == '-') ++pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(s_.data() + start, s_.data() + pos_, v);
    if (ec != std::errc{} || ptr != s_.data() + pos_) fail("expected an integer", start);
    return v;
  }

  std::string use(const char* what) {
    skip_ws();
    const std::size_t at = pos_;
    std::string name = ident(what);
    if (is_keyword(name)) fail("unexpected keyword '" + name + "'", at);
    if (!defined_.contains(name)) fail("use of undefined variable '" + name + "'", at);
    return name;
  }

  Expr operand() {
    skip_ws();
    if (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '-'))
      return Expr::constant(integer());
    return Expr::variable(use("a variable or integer"));
  }

  Expr expression() {
    Expr e = operand();
    for (;;) {
      skip_ws();
      if (pos_ >= s_.size() || kOps.find(s_[pos_]) == std::string_view::npos) return e;
      const char op = s_[pos_++];
      e = Expr::binop(op, std::move(e), operand());
    }
  }

  void call_tail(Statement& st) {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && s_[pos_] != '(' && !std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    st.callee = std::string(s_.substr(start, pos_ - start));
    if (!valid_callee(st.callee)) fail("malformed callee '" + st.callee + "', expected fqcn#name", start);
    expect('(');
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == ')') {
      ++pos_;
      return;
    }
    for (;;) {
      skip_ws();
      Operand a;
      if (peek_word("null")) {
        pos_ += 4;
        a.kind = Operand::Kind::Null;
      } else if (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '-')) {
        a.kind = Operand::Kind::Const;
        a.value = integer();
      } else {
        a.kind = Operand::Kind::Var;
        a.var = use("an argument");
      }
      st.args.push_back(std::move(a));
      skip_ws();
      if (pos_ < s_.size() && s_[pos_] == ',') {
        ++pos_;
        continue;
      }
      expect(')');
      return;
    }
  }

  std::string_view s_;
  std::size_t line_;
  std::size_t pos_ = 0;
  const std::set<std::string>& defined_;
};

void collect_vars(const Expr& e, std::vector<std::string>& out) {
  if (e.kind == Expr::Kind::Var) out.push_back(e.var);
  for (const auto& o : e.operands) collect_vars(o, out);
}

std::string format_expr(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Const: return std::to_string(e.value);
    case Expr::Kind::Var: return e.var;
    case Expr::Kind::Binop: return format_expr(e.operands[0]) + " " + e.op + " " + format_expr(e.operands[1]);
  }
  return {};
}

std::string format_operand(const Operand& o) {
  switch (o.kind) {
    case Operand::Kind::Var: return o.var;
    case Operand::Kind::Const: return std::to_string(o.value);
    case Operand::Kind::Null: return "null";
  }
  return {};
}

std::set<std::string> keys_of(const std::set<std::string>& list) {
  std::set<std::string> out;
  for (const auto& e : list) out.insert(callee_key(e));
  return out;
}

std::size_t parse_site(const std::string& s, std::size_t row) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size())
    throw FormatError("flows row " + std::to_string(row) + ": site '" + s + "' is not a non-negative integer");
  return v;
}

}  // namespace

bool valid_callee(std::string_view sig) {
  const auto hash = sig.find('#');
  if (hash == std::string_view::npos || sig.find('#', hash + 1) != std::string_view::npos) return false;
  auto valid_dotted = [](std::string_view s) {
    if (s.empty()) return false;
    bool at_start = true;
    for (char c : s) {
      if (c == '.') {
        if (at_start) return false;
        at_start = true;
      } else if (at_start ? ident_start(c) : ident_char(c)) {
        at_start = false;
      } else {
        return false;
      }
    }
    return !at_start;
  };
  const auto name = sig.substr(hash + 1);
  return valid_dotted(sig.substr(0, hash)) && valid_dotted(name) && name.find('.') == std::string_view::npos;
}

std::string callee_key(std::string_view entry) {
  const std::string key = trim(entry.substr(0, entry.find('(')));
  if (!valid_callee(key)) throw FormatError("malformed signature '" + std::string(entry) + "'");
  return key;
}

std::set<std::string> parse_signature_list(std::string_view text) {
  std::set<std::string> out;
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string line = trim(lines[i]);
    if (line.empty() || line.starts_with("//")) continue;
    try {
      callee_key(line);
    } catch (const FormatError& e) {
      throw FormatError("line " + std::to_string(i + 1) + ": " + e.what());
    }
    out.insert(line);
  }
  return out;
}

Program parse_program(std::string_view text) {
  Program p;
  std::set<std::string> defined;
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string_view line = lines[i];
    std::size_t lead = 0;
    while (lead < line.size() && std::isspace(static_cast<unsigned char>(line[lead]))) ++lead;
    if (lead == line.size() || line.substr(lead).starts_with("//")) continue;
    Statement st = LineParser(line, i + 1, defined).statement();
    if (!st.target.empty()) defined.insert(st.target);
    p.statements.push_back(std::move(st));
  }
  return p;
}

std::string format_program(const Program& p) {
  std::ostringstream out;
  for (const auto& st : p.statements) {
    if (!st.target.empty()) out << st.target << " = ";
    if (st.kind == Statement::Kind::Assign) {
      out << (st.expr.kind == Expr::Kind::Const ? "const " : "") << format_expr(st.expr);
    } else {
      out << "call " << st.callee << "(";
      for (std::size_t i = 0; i < st.args.size(); ++i) out << (i ? ", " : "") << format_operand(st.args[i]);
      out << ")";
    }
    out << ";\n";
  }
  return out.str();
}

void validate(const Program& p) {
  std::set<std::string> defined;
  for (std::size_t i = 0; i < p.statements.size(); ++i) {
    const auto& st = p.statements[i];
    std::vector<std::string> used;
    if (st.kind == Statement::Kind::Assign) {
      collect_vars(st.expr, used);
    } else {
      if (!valid_callee(st.callee)) throw ParseError("malformed callee '" + st.callee + "'", i + 1, 1);
      for (const auto& a : st.args)
        if (a.kind == Operand::Kind::Var) used.push_back(a.var);
    }
    for (const auto& v : used)
      if (!defined.contains(v)) throw ParseError("use of undefined variable '" + v + "'", i + 1, 1);
    if (st.kind != Statement::Kind::CallVoid) {
      if (st.target.empty() || is_keyword(st.target)) throw ParseError("missing assignment target", i + 1, 1);
      defined.insert(st.target);
    }
  }
}

std::vector<Flow> propagate(const Program& p, const std::set<std::string>& sources,
                            const std::set<std::string>& sinks, TaintState* final_state) {
  const auto source_keys = keys_of(sources);
  const auto sink_keys = keys_of(sinks);
  TaintState state;
  std::set<std::pair<std::size_t, std::size_t>> pairs;  // (sink site, source site)
  std::vector<std::string> vars;
  for (std::size_t i = 0; i < p.statements.size(); ++i) {
    const auto& st = p.statements[i];
    std::set<std::size_t> taint;
    if (st.kind == Statement::Kind::Assign) {
      vars.clear();
      collect_vars(st.expr, vars);
      for (const auto& v : vars)
        if (auto it = state.find(v); it != state.end()) taint.insert(it->second.begin(), it->second.end());
    } else {
      if (sink_keys.contains(st.callee)) {
        for (const auto& a : st.args) {
          if (a.kind != Operand::Kind::Var) continue;
          if (auto it = state.find(a.var); it != state.end())
            for (auto origin : it->second) pairs.emplace(i, origin);
        }
      }
      if (source_keys.contains(st.callee)) taint.insert(i);
    }
    if (st.kind == Statement::Kind::CallVoid) continue;
    if (taint.empty()) state.erase(st.target);
    else state[st.target] = std::move(taint);
  }
  std::vector<Flow> flows;
  flows.reserve(pairs.size());
  for (const auto& [sink, source] : pairs)
    flows.push_back({p.statements[source].callee, source, p.statements[sink].callee, sink});
  if (final_state) *final_state = std::move(state);
  return flows;
}

ReducedLists reduce_lists(const std::vector<Flow>& flows, const std::set<std::string>& sources,
                          const std::set<std::string>& sinks) {
  std::set<std::string> used_sources, used_sinks;
  for (const auto& f : flows) used_sources.insert(f.source_sig), used_sinks.insert(f.sink_sig);
  ReducedLists out;
  for (const auto& s : sources)
    if (used_sources.contains(callee_key(s))) out.sources.insert(s);
  for (const auto& s : sinks)
    if (used_sinks.contains(callee_key(s))) out.sinks.insert(s);
  return out;
}

FlowReport flow_report(const std::vector<Flow>& flows) {
  FlowReport r;
  r.total = flows.size();
  std::map<std::string, std::size_t> src, snk;
  for (const auto& f : flows) ++src[f.source_sig], ++snk[f.sink_sig];
  auto table = [&](const std::map<std::string, std::size_t>& counts) {
    std::vector<SigShare> out;
    for (const auto& [sig, n] : counts)
      out.push_back({sig, n, static_cast<double>(n) / static_cast<double>(r.total)});
    std::stable_sort(out.begin(), out.end(), [](const SigShare& a, const SigShare& b) { return a.count > b.count; });
    return out;
  };
  r.sources = table(src);
  r.sinks = table(snk);
  return r;
}

FpRate fp_rate(const std::set<std::string>& used, const std::map<std::string, bool>& oracle) {
  FpRate r;
  for (const auto& sig : used) {
    const auto it = oracle.find(sig);
    if (it == oracle.end()) throw MissingLabel("no verdict for '" + sig + "'");
    (it->second ? r.true_positives : r.false_positives)++;
  }
  const std::size_t n = r.true_positives + r.false_positives;
  r.undefined = n == 0;
  r.rate = n == 0 ? 0.0 : static_cast<double>(r.false_positives) / static_cast<double>(n);
  return r;
}

std::map<std::string, bool> parse_oracle_csv(std::string_view text) {
  std::map<std::string, bool> out;
  const auto rows = parse_csv(text);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (row.size() == 1 && trim(row[0]).empty()) continue;
    if (i == 0 && !row.empty() && trim(row[0]) == "signature") continue;
    if (row.size() != 2) throw FormatError("oracle row " + std::to_string(i + 1) + ": expected signature,verdict");
    const std::string verdict = to_lower_ascii(trim(row[1]));
    if (verdict != "tp" && verdict != "fp")
      throw FormatError("oracle row " + std::to_string(i + 1) + ": verdict must be TP or FP");
    const std::string sig = trim(row[0]);
    const bool tp = verdict == "tp";
    if (auto [it, inserted] = out.emplace(sig, tp); !inserted && it->second != tp)
      throw FormatError("oracle row " + std::to_string(i + 1) + ": conflicting verdicts for '" + sig + "'");
  }
  return out;
}

std::vector<NamedProgram> load_programs(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw FormatError("not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".prog") files.push_back(e.path());
  std::vector<NamedProgram> out;
  for (const auto& f : files) {
    const std::string name = fs::relative(f, dir).generic_string();
    try {
      out.push_back({name, parse_program(read_file(f.string()))});
    } catch (const ParseError& e) {
      throw ParseError(name + ": " + e.detail(), e.line(), e.column());
    }
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
  return out;
}

std::vector<CorpusFlow> propagate_corpus(const std::vector<NamedProgram>& programs,
                                         const std::set<std::string>& sources, const std::set<std::string>& sinks) {
  std::vector<CorpusFlow> out;
  for (const auto& p : programs)
    for (auto& f : propagate(p.program, sources, sinks)) out.push_back({p.name, std::move(f)});
  return out;
}

std::string format_flows_csv(const std::vector<CorpusFlow>& flows) {
  std::string out = "program,sourceSig,sourceSite,sinkSig,sinkSite\n";
  for (const auto& f : flows)
    out += csv_row({f.program, f.flow.source_sig, std::to_string(f.flow.source_site), f.flow.sink_sig,
                    std::to_string(f.flow.sink_site)});
  return out;
}

std::vector<CorpusFlow> parse_flows_csv(std::string_view text) {
  const auto rows = parse_csv(text);
  if (rows.empty() || rows[0] != std::vector<std::string>{"program", "sourceSig", "sourceSite", "sinkSig", "sinkSite"})
    throw FormatError("flows CSV must start with program,sourceSig,sourceSite,sinkSig,sinkSite");
  std::vector<CorpusFlow> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.size() == 1 && r[0].empty()) continue;
    if (r.size() != 5) throw FormatError("flows row " + std::to_string(i + 1) + ": expected 5 fields");
    CorpusFlow f{r[0], {r[1], parse_site(r[2], i + 1), r[3], parse_site(r[4], i + 1)}};
    if (f.flow.source_site >= f.flow.sink_site)
      throw FormatError("flows row " + std::to_string(i + 1) + ": source site must precede sink site");
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace apisift::taint
