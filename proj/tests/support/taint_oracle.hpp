#pragma once

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "apisift/taint.hpp"

// Def-use graph reachability, written without any propagation state: each
// use is linked to its reaching definition, and a flow exists when a sink
// argument's definition is reachable from a source definition through
// assignments.
namespace oracle {

inline std::string key(const std::string& entry) { return entry.substr(0, entry.find('(')); }

inline std::set<std::pair<std::size_t, std::size_t>> reachable_flows(const apisift::taint::Program& p,
                                                                     const std::set<std::string>& sources,
                                                                     const std::set<std::string>& sinks) {
  using apisift::taint::Expr;
  using apisift::taint::Operand;
  using apisift::taint::Statement;
  std::set<std::string> src, snk;
  for (const auto& s : sources) src.insert(key(s));
  for (const auto& s : sinks) snk.insert(key(s));

  const std::size_t n = p.statements.size();
  auto reaching_def = [&](const std::string& var, std::size_t at) -> long {
    for (std::size_t i = at; i-- > 0;)
      if (p.statements[i].target == var) return static_cast<long>(i);
    return -1;
  };
  std::vector<std::vector<std::string>> uses(n);
  for (std::size_t j = 0; j < n; ++j) {
    const auto& st = p.statements[j];
    if (st.kind == Statement::Kind::Assign) {
      std::vector<const Expr*> stack{&st.expr};
      while (!stack.empty()) {
        const Expr* e = stack.back();
        stack.pop_back();
        if (e->kind == Expr::Kind::Var) uses[j].push_back(e->var);
        for (const auto& o : e->operands) stack.push_back(&o);
      }
    } else {
      for (const auto& a : st.args)
        if (a.kind == Operand::Kind::Var) uses[j].push_back(a.var);
    }
  }
  // Value edges d -> j: the definition made at j reads the one made at d.
  std::vector<std::vector<std::size_t>> edges(n);
  for (std::size_t j = 0; j < n; ++j) {
    if (p.statements[j].kind != Statement::Kind::Assign) continue;
    for (const auto& u : uses[j])
      if (long d = reaching_def(u, j); d >= 0) edges[static_cast<std::size_t>(d)].push_back(j);
  }
  std::set<std::pair<std::size_t, std::size_t>> flows;  // (sink site, source site)
  for (std::size_t s = 0; s < n; ++s) {
    const auto& st = p.statements[s];
    if (st.kind != Statement::Kind::CallAssign || !src.contains(st.callee)) continue;
    std::vector<bool> seen(n, false);
    std::vector<std::size_t> stack{s};
    seen[s] = true;
    while (!stack.empty()) {
      const std::size_t d = stack.back();
      stack.pop_back();
      for (auto j : edges[d])
        if (!seen[j]) seen[j] = true, stack.push_back(j);
    }
    for (std::size_t k = s + 1; k < n; ++k) {
      const auto& sk = p.statements[k];
      if (sk.kind == Statement::Kind::Assign || !snk.contains(sk.callee)) continue;
      for (const auto& u : uses[k])
        if (long d = reaching_def(u, k); d >= 0 && seen[static_cast<std::size_t>(d)]) flows.emplace(k, s);
    }
  }
  return flows;
}

}  // namespace oracle
