#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace apisift {

struct MethodRecord;

/// Syntax tree of a method body. A terminal carries source text and has no
/// children; inner nodes carry only a kind tag (operators are folded into
/// the kind, e.g. "Binary:+").
struct AstNode {
  std::string kind;
  std::string token;
  std::vector<AstNode> children;

  static AstNode terminal(std::string kind, std::string token) { return AstNode{std::move(kind), std::move(token), {}}; }
  static AstNode inner(std::string kind, std::vector<AstNode> children = {}) {
    return AstNode{std::move(kind), {}, std::move(children)};
  }

  bool is_terminal() const { return children.empty() && !token.empty(); }
  bool operator==(const AstNode&) const = default;
};

/// Parses a method body ("{ ... }") into a tree rooted at a MethodDecl node
/// whose children are the body's statements. Every identifier, literal,
/// primitive type name, `this`, `super` and `void` token of the body yields
/// exactly one terminal. Throws ParseError on unsupported syntax.
AstNode parse_method_body(std::string_view body);

AstNode build_ast(const MethodRecord& record);

std::size_t count_terminals(const AstNode& root);
std::size_t count_nodes(const AstNode& root);

/// S-expression rendering, for debugging and golden tests.
std::string to_sexpr(const AstNode& root);

}  // namespace apisift
