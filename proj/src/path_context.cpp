#include "apisift/path_context.hpp"

#include "apisift/error.hpp"

namespace apisift {

namespace {

struct Step {
  const AstNode* node;
  std::size_t child_index;  // index of this node within its parent
};

struct TerminalPath {
  std::vector<Step> steps;  // root first, terminal last
};

void collect(const AstNode& n, std::vector<Step>& stack, std::vector<TerminalPath>& out) {
  if (n.is_terminal()) {
    out.push_back(TerminalPath{stack});
    return;
  }
  for (std::size_t i = 0; i < n.children.size(); ++i) {
    stack.push_back(Step{&n.children[i], i});
    collect(n.children[i], stack, out);
    stack.pop_back();
  }
}

}  // namespace

std::string path_string(const PathContext& ctx) {
  std::string out;
  for (std::size_t i = 0; i < ctx.kinds.size(); ++i) {
    if (i) out += ctx.moves[i - 1] == Direction::Up ? '^' : '_';
    out += ctx.kinds[i];
  }
  return out;
}

std::vector<PathContext> extract_path_contexts(const AstNode& ast, PathLimits limits) {
  if (limits.max_length < 2) throw ConfigError("max path length must be at least 2");
  if (limits.max_width < 1) throw ConfigError("max path width must be at least 1");

  std::vector<TerminalPath> terminals;
  std::vector<Step> stack{Step{&ast, 0}};
  collect(ast, stack, terminals);

  std::vector<PathContext> out;
  for (std::size_t a = 0; a < terminals.size(); ++a) {
    const auto& pa = terminals[a].steps;
    for (std::size_t b = a + 1; b < terminals.size(); ++b) {
      const auto& pb = terminals[b].steps;
      std::size_t common = 0;  // number of shared steps; the LCA is steps[common - 1]
      while (common < pa.size() && common < pb.size() && pa[common].node == pb[common].node) ++common;
      const std::size_t ups = pa.size() - common;
      const std::size_t downs = pb.size() - common;
      if (ups + downs > limits.max_length) continue;
      const std::size_t width = pb[common].child_index - pa[common].child_index;
      if (width > limits.max_width) continue;

      PathContext ctx;
      ctx.left = pa.back().node->token;
      ctx.right = pb.back().node->token;
      ctx.left_index = a;
      ctx.right_index = b;
      for (std::size_t i = pa.size(); i-- > common - 1;) {
        ctx.kinds.push_back(pa[i].node->kind);
        if (i >= common) ctx.moves.push_back(Direction::Up);
      }
      for (std::size_t i = common; i < pb.size(); ++i) {
        ctx.kinds.push_back(pb[i].node->kind);
        ctx.moves.push_back(Direction::Down);
      }
      out.push_back(std::move(ctx));
    }
  }
  return out;
}

}  // namespace apisift
