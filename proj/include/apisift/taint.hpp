#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

// Taint propagation over a tiny straight-line language with calls.
//
//   v = const N;   v = w;   v = w OP u;   v = call SIG(a, b);   call SIG(a, b);
//
// SIG is `fqcn#name`. Lines may be blank or `//` comments. Statement sites
// are 0-based statement indices.
namespace apisift::taint {

struct Operand {
  enum class Kind { Var, Const, Null };
  Kind kind = Kind::Const;
  std::string var;
  long long value = 0;

  bool operator==(const Operand&) const = default;
};

struct Expr {
  enum class Kind { Const, Var, Binop };
  Kind kind = Kind::Const;
  long long value = 0;
  std::string var;
  char op = 0;
  std::vector<Expr> operands;  // two for Binop

  static Expr constant(long long v);
  static Expr variable(std::string name);
  static Expr binop(char op, Expr lhs, Expr rhs);
  bool operator==(const Expr&) const = default;
};

struct Statement {
  enum class Kind { Assign, CallAssign, CallVoid };
  Kind kind = Kind::Assign;
  std::string target;  // empty for CallVoid
  Expr expr;           // Assign only
  std::string callee;  // fqcn#name
  std::vector<Operand> args;
  std::size_t line = 0;

  bool operator==(const Statement& o) const {
    return kind == o.kind && target == o.target && expr == o.expr && callee == o.callee && args == o.args;
  }
};

struct Program {
  std::vector<Statement> statements;
};

/// Throws ParseError with the line and column of the first problem,
/// including a use of a variable before its definition.
Program parse_program(std::string_view text);
std::string format_program(const Program& p);

/// Throws ParseError when a statement reads an undefined variable or names
/// a malformed callee. parse_program already guarantees this.
void validate(const Program& p);

/// `fqcn#name` part of a list entry: "a.B#c(int):void" and "a.B#c" share
/// the key "a.B#c". Throws FormatError on an entry without '#'.
std::string callee_key(std::string_view entry);
bool valid_callee(std::string_view sig);

/// One entry per line; blank lines and lines starting with "//" are
/// skipped. Throws FormatError on a malformed entry.
std::set<std::string> parse_signature_list(std::string_view text);

struct Flow {
  std::string source_sig;
  std::size_t source_site = 0;
  std::string sink_sig;
  std::size_t sink_site = 0;

  auto operator<=>(const Flow&) const = default;
};

/// Per variable, the source sites its current value derives from.
using TaintState = std::map<std::string, std::set<std::size_t>>;

/// Forward propagation. A source call taints its result with its own site;
/// a non-source call result and a constant are clean; an assignment takes
/// the union of its operands' taint. A sink call whose arguments carry
/// taint emits one flow per origin site. Sorted by (sink site, source site).
std::vector<Flow> propagate(const Program& p, const std::set<std::string>& sources,
                            const std::set<std::string>& sinks, TaintState* final_state = nullptr);

struct ReducedLists {
  std::set<std::string> sources;
  std::set<std::string> sinks;
};

/// Keeps the list entries whose key occurs in at least one flow.
ReducedLists reduce_lists(const std::vector<Flow>& flows, const std::set<std::string>& sources,
                          const std::set<std::string>& sinks);

struct SigShare {
  std::string sig;
  std::size_t count = 0;
  double share = 0;
};

struct FlowReport {
  std::size_t total = 0;
  std::vector<SigShare> sources;  // descending count, then signature
  std::vector<SigShare> sinks;
};

FlowReport flow_report(const std::vector<Flow>& flows);

struct FpRate {
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  double rate = 0;
  bool undefined = false;  // empty list
};

/// FP/(FP+TP) over `used`. `oracle` maps a signature to true for a true
/// positive. Throws MissingLabel when a used signature has no verdict.
FpRate fp_rate(const std::set<std::string>& used, const std::map<std::string, bool>& oracle);

/// signature,verdict rows with verdict TP or FP; header optional.
std::map<std::string, bool> parse_oracle_csv(std::string_view text);

struct NamedProgram {
  std::string name;
  Program program;
};

/// Every `*.prog` file below `dir`, sorted by relative path. Parse errors
/// are rethrown with the file name.
std::vector<NamedProgram> load_programs(const std::filesystem::path& dir);

struct CorpusFlow {
  std::string program;
  Flow flow;

  auto operator<=>(const CorpusFlow&) const = default;
};

std::vector<CorpusFlow> propagate_corpus(const std::vector<NamedProgram>& programs,
                                         const std::set<std::string>& sources, const std::set<std::string>& sinks);

/// program,sourceSig,sourceSite,sinkSig,sinkSite
std::string format_flows_csv(const std::vector<CorpusFlow>& flows);
std::vector<CorpusFlow> parse_flows_csv(std::string_view text);

}  // namespace apisift::taint
