#include "apisift/ast.hpp"

#include <array>

#include "apisift/error.hpp"
#include "apisift/extractor.hpp"
#include "apisift/java_lexer.hpp"

namespace apisift {

using java::Token;
using java::TokenKind;

namespace {

int binary_precedence(std::string_view op) {
  static constexpr std::array<std::pair<std::string_view, int>, 19> kTable{{
      {"||", 1}, {"&&", 2}, {"|", 3},  {"^", 4},  {"&", 5},  {"==", 6}, {"!=", 6},
      {"<", 7},  {">", 7},  {"<=", 7}, {">=", 7}, {"<<", 8}, {">>", 8}, {">>>", 8},
      {"+", 9},  {"-", 9},  {"*", 10}, {"/", 10}, {"%", 10},
  }};
  for (const auto& [o, p] : kTable)
    if (o == op) return p;
  return 0;
}

bool is_assign_op(std::string_view op) {
  return op == "=" || op == "+=" || op == "-=" || op == "*=" || op == "/=" || op == "%=" || op == "&=" ||
         op == "|=" || op == "^=" || op == "<<=" || op == ">>=" || op == ">>>=";
}

class BodyParser {
 public:
  explicit BodyParser(std::string_view body) : ts_(java::tokenize(body)) {}

  AstNode run() {
    AstNode root = AstNode::inner("MethodDecl");
    expect("{");
    while (!is("}")) {
      if (at_end()) fail("unterminated body");
      append_statement(root.children);
    }
    expect("}");
    if (!at_end()) fail("trailing tokens after body");
    return root;
  }

 private:
  // ---- token helpers -------------------------------------------------------
  const Token& cur() const { return ts_.tokens[pos_]; }
  const Token& look(std::size_t k) const { return ts_.tokens[std::min(pos_ + k, ts_.tokens.size() - 1)]; }
  bool at_end() const { return cur().kind == TokenKind::End; }
  bool is(std::string_view p) const { return cur().kind == TokenKind::Punct && cur().text == p; }
  bool is_kw(std::string_view w) const { return cur().kind == TokenKind::Keyword && cur().text == w; }
  bool is_ident() const { return cur().kind == TokenKind::Identifier; }
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

  void expect_kw(std::string_view w) {
    if (!is_kw(w)) fail("expected '" + std::string(w) + "'");
    next();
  }

  AstNode name(std::string kind = "Name") {
    if (!is_ident()) fail("expected identifier");
    return AstNode::terminal(std::move(kind), next().text);
  }

  void skip_annotations() {
    while (is("@")) {
      next();
      name();
      while (is(".")) {
        next();
        name();
      }
      if (is("(")) {
        int depth = 0;
        do {
          if (at_end()) fail("unbalanced annotation");
          if (is("(")) ++depth;
          if (is(")")) --depth;
          next();
        } while (depth > 0);
      }
    }
  }

  void skip_local_modifiers() {
    while (true) {
      skip_annotations();
      if (is_kw("final")) next();
      else break;
    }
  }

  // ---- types ---------------------------------------------------------------
  // '>>' and '>>>' close several type argument lists at once; the surplus
  // closers are tracked here.
  int pending_closers_ = 0;

  bool close_type_args() {
    if (pending_closers_ > 0) {
      --pending_closers_;
      return true;
    }
    if (is(">")) {
      next();
      return true;
    }
    if (is(">>")) {
      next();
      pending_closers_ = 1;
      return true;
    }
    if (is(">>>")) {
      next();
      pending_closers_ = 2;
      return true;
    }
    return false;
  }

  AstNode type_arguments() {
    AstNode args = AstNode::inner("TypeArgs");
    expect("<");
    if (pending_closers_ == 0 && is(">")) {  // diamond
      next();
      return args;
    }
    while (true) {
      skip_annotations();
      if (is("?")) {
        next();
        AstNode wild = AstNode::inner("Wildcard");
        if (is_kw("extends") || is_kw("super")) {
          const std::string bound = next().text;
          wild = AstNode::inner("Wildcard:" + bound, {type()});
        }
        args.children.push_back(std::move(wild));
      } else {
        args.children.push_back(type());
      }
      if (pending_closers_ == 0 && is(",")) {
        next();
        continue;
      }
      if (!close_type_args()) fail("expected '>'");
      return args;
    }
  }

  AstNode type() {
    skip_annotations();
    AstNode t;
    if (cur().kind == TokenKind::Keyword && (java::is_primitive_type(cur().text) || cur().text == "void")) {
      t = AstNode::terminal("Type", next().text);
    } else {
      t = class_type();
    }
    while (pending_closers_ == 0 && is("[") && look(1).text == "]") {
      next();
      next();
      t = AstNode::inner("ArrayType", {std::move(t)});
    }
    return t;
  }

  AstNode class_type() {
    AstNode t = name("Type");
    if (is("<")) t = AstNode::inner("GenericType", {std::move(t), type_arguments()});
    while (pending_closers_ == 0 && is(".") && look(1).kind == TokenKind::Identifier) {
      next();
      AstNode part = name("Type");
      if (is("<")) part = AstNode::inner("GenericType", {std::move(part), type_arguments()});
      t = AstNode::inner("ScopedType", {std::move(t), std::move(part)});
    }
    return t;
  }

  // Speculatively parses a type followed by an identifier (a declaration
  // head). Restores the position and returns false if that fails.
  bool looks_like_declaration() {
    const std::size_t save = pos_;
    bool ok = false;
    try {
      skip_local_modifiers();
      if (is_ident() || (cur().kind == TokenKind::Keyword && java::is_primitive_type(cur().text))) {
        type();
        ok = pending_closers_ == 0 && is_ident() &&
             (look(1).text == "=" || look(1).text == ";" || look(1).text == "," || look(1).text == "[" ||
              look(1).text == ":" || look(1).text == ")");
      }
    } catch (const ParseError&) {
      ok = false;
    }
    pending_closers_ = 0;
    pos_ = save;
    return ok;
  }

  // ---- statements ----------------------------------------------------------
  void append_statement(std::vector<AstNode>& out) {
    if (is(";")) {
      next();
      return;
    }
    out.push_back(statement());
  }

  AstNode block() {
    AstNode b = AstNode::inner("Block");
    expect("{");
    while (!is("}")) {
      if (at_end()) fail("unterminated block");
      append_statement(b.children);
    }
    expect("}");
    return b;
  }

  AstNode local_var_decl() {
    skip_local_modifiers();
    AstNode decl = AstNode::inner("LocalVar", {type()});
    while (true) {
      AstNode d = AstNode::inner("Declarator", {name()});
      while (is("[")) {
        next();
        expect("]");
        d.kind = "Declarator[]";
      }
      if (is("=")) {
        next();
        d.children.push_back(is("{") ? array_initializer() : expression());
      }
      decl.children.push_back(std::move(d));
      if (!is(",")) break;
      next();
    }
    return decl;
  }

  AstNode statement() {
    if (is("{")) return block();
    if (cur().kind == TokenKind::Keyword) {
      const std::string kw = cur().text;
      if (kw == "if") {
        next();
        AstNode n = AstNode::inner("If", {paren_expression()});
        n.children.push_back(sub_statement());
        if (is_kw("else")) {
          next();
          n.children.push_back(AstNode::inner("Else", {sub_statement()}));
        }
        return n;
      }
      if (kw == "while") {
        next();
        AstNode n = AstNode::inner("While", {paren_expression()});
        n.children.push_back(sub_statement());
        return n;
      }
      if (kw == "do") {
        next();
        AstNode n = AstNode::inner("Do", {sub_statement()});
        expect_kw("while");
        n.children.push_back(paren_expression());
        expect(";");
        return n;
      }
      if (kw == "for") return for_statement();
      if (kw == "return") {
        next();
        AstNode n = AstNode::inner("Return");
        if (!is(";")) n.children.push_back(expression());
        expect(";");
        return n;
      }
      if (kw == "throw") {
        next();
        AstNode n = AstNode::inner("Throw", {expression()});
        expect(";");
        return n;
      }
      if (kw == "break" || kw == "continue") {
        next();
        AstNode n = AstNode::inner(kw == "break" ? "Break" : "Continue");
        if (is_ident()) n.children.push_back(name("Label"));
        expect(";");
        return n;
      }
      if (kw == "try") return try_statement();
      if (kw == "switch") return switch_statement();
      if (kw == "synchronized") {
        next();
        AstNode n = AstNode::inner("Synchronized", {paren_expression()});
        n.children.push_back(block());
        return n;
      }
      if (kw == "assert") {
        next();
        AstNode n = AstNode::inner("Assert", {expression()});
        if (is(":")) {
          next();
          n.children.push_back(expression());
        }
        expect(";");
        return n;
      }
      if (kw == "class" || kw == "interface" || kw == "enum") fail("local type declarations are not supported");
    }
    if (is_ident() && look(1).text == ":" ) {
      AstNode n = AstNode::inner("Labeled", {name("Label")});
      next();
      n.children.push_back(statement());
      return n;
    }
    if (is_kw("final") || is("@") || looks_like_declaration()) {
      AstNode d = local_var_decl();
      expect(";");
      return d;
    }
    AstNode n = AstNode::inner("ExprStmt", {expression()});
    expect(";");
    return n;
  }

  // Statement in a nested position; a lone ';' becomes an empty block.
  AstNode sub_statement() {
    if (is(";")) {
      next();
      return AstNode::inner("Block");
    }
    return statement();
  }

  AstNode paren_expression() {
    expect("(");
    AstNode e = expression();
    expect(")");
    return e;
  }

  AstNode for_statement() {
    expect_kw("for");
    expect("(");
    if (looks_like_declaration()) {
      const std::size_t save = pos_;
      skip_local_modifiers();
      AstNode t = type();
      if (is_ident() && look(1).text == ":") {
        AstNode n = AstNode::inner("ForEach", {std::move(t), name()});
        next();
        n.children.push_back(expression());
        expect(")");
        n.children.push_back(sub_statement());
        return n;
      }
      pos_ = save;
    }
    AstNode init = AstNode::inner("ForInit");
    if (!is(";")) {
      if (looks_like_declaration()) {
        init.children.push_back(local_var_decl());
      } else {
        init.children.push_back(expression());
        while (is(",")) {
          next();
          init.children.push_back(expression());
        }
      }
    }
    expect(";");
    AstNode cond = AstNode::inner("ForCond");
    if (!is(";")) cond.children.push_back(expression());
    expect(";");
    AstNode update = AstNode::inner("ForUpdate");
    if (!is(")")) {
      update.children.push_back(expression());
      while (is(",")) {
        next();
        update.children.push_back(expression());
      }
    }
    expect(")");
    return AstNode::inner("For", {std::move(init), std::move(cond), std::move(update), sub_statement()});
  }

  AstNode try_statement() {
    expect_kw("try");
    AstNode n = AstNode::inner("Try");
    if (is("(")) {
      next();
      AstNode res = AstNode::inner("Resources");
      while (!is(")")) {
        if (looks_like_declaration()) res.children.push_back(local_var_decl());
        else res.children.push_back(expression());
        if (is(";")) next();
        else if (!is(")")) fail("expected ';' or ')' in resources");
      }
      next();
      n.children.push_back(std::move(res));
    }
    n.children.push_back(block());
    while (is_kw("catch")) {
      next();
      expect("(");
      skip_local_modifiers();
      AstNode c = AstNode::inner("Catch", {type()});
      while (is("|")) {
        next();
        c.children.push_back(type());
      }
      c.children.push_back(name());
      expect(")");
      c.children.push_back(block());
      n.children.push_back(std::move(c));
    }
    if (is_kw("finally")) {
      next();
      n.children.push_back(AstNode::inner("Finally", {block()}));
    }
    if (n.children.size() < 2) fail("try without catch or finally");
    return n;
  }

  AstNode switch_statement() {
    expect_kw("switch");
    AstNode n = AstNode::inner("Switch", {paren_expression()});
    expect("{");
    while (!is("}")) {
      if (at_end()) fail("unterminated switch");
      AstNode c;
      if (is_kw("case")) {
        next();
        c = AstNode::inner("Case", {ternary()});
        while (is(",")) {
          next();
          c.children.push_back(ternary());
        }
      } else if (is_kw("default")) {
        next();
        c = AstNode::inner("Default");
      } else {
        fail("expected case or default");
      }
      if (is("->")) fail("switch rules are not supported");
      expect(":");
      while (!is("}") && !is_kw("case") && !is_kw("default")) {
        if (at_end()) fail("unterminated switch");
        append_statement(c.children);
      }
      n.children.push_back(std::move(c));
    }
    expect("}");
    return n;
  }

  // ---- expressions ---------------------------------------------------------
  AstNode expression() {
    if (lambda_ahead()) return lambda();
    AstNode lhs = ternary();
    if (cur().kind == TokenKind::Punct && is_assign_op(cur().text)) {
      const std::string op = next().text;
      AstNode rhs = is("{") ? array_initializer() : expression();
      return AstNode::inner(op == "=" ? "Assign" : "Assign:" + op, {std::move(lhs), std::move(rhs)});
    }
    return lhs;
  }

  bool lambda_ahead() const {
    if (is_ident() && look(1).text == "->") return true;
    if (!is("(")) return false;
    int depth = 0;
    for (std::size_t k = pos_; k < ts_.tokens.size(); ++k) {
      const Token& t = ts_.tokens[k];
      if (t.kind == TokenKind::End) return false;
      if (t.kind == TokenKind::Punct && t.text == "(") ++depth;
      if (t.kind == TokenKind::Punct && t.text == ")" && --depth == 0) {
        return k + 1 < ts_.tokens.size() && ts_.tokens[k + 1].text == "->";
      }
    }
    return false;
  }

  AstNode lambda() {
    AstNode params = AstNode::inner("LambdaParams");
    if (is_ident()) {
      params.children.push_back(name());
    } else {
      expect("(");
      while (!is(")")) {
        skip_local_modifiers();
        if (is_ident() && (look(1).text == "," || look(1).text == ")")) {
          params.children.push_back(name());
        } else {
          AstNode p = AstNode::inner("Param", {type()});
          p.children.push_back(name());
          params.children.push_back(std::move(p));
        }
        if (is(",")) next();
        else if (!is(")")) fail("expected ',' or ')' in lambda parameters");
      }
      next();
    }
    expect("->");
    AstNode body = is("{") ? block() : expression();
    return AstNode::inner("Lambda", {std::move(params), std::move(body)});
  }

  AstNode ternary() {
    AstNode c = binary(1);
    if (!is("?")) return c;
    next();
    AstNode a = is("{") ? array_initializer() : (lambda_ahead() ? lambda() : ternary());
    expect(":");
    AstNode b = lambda_ahead() ? lambda() : ternary();
    return AstNode::inner("Conditional", {std::move(c), std::move(a), std::move(b)});
  }

  AstNode binary(int min_prec) {
    AstNode lhs = unary();
    while (true) {
      if (is_kw("instanceof")) {
        if (7 < min_prec) break;
        next();
        skip_local_modifiers();
        AstNode t = type();
        lhs = AstNode::inner("InstanceOf", {std::move(lhs), std::move(t)});
        if (is_ident()) lhs.children.push_back(name());  // pattern binding
        continue;
      }
      if (cur().kind != TokenKind::Punct) break;
      const std::string op = cur().text;
      const int prec = binary_precedence(op);
      if (prec == 0 || prec < min_prec) break;
      next();
      AstNode rhs = binary(prec + 1);
      lhs = AstNode::inner("Binary:" + op, {std::move(lhs), std::move(rhs)});
    }
    return lhs;
  }

  bool cast_ahead() {
    if (!is("(")) return false;
    const std::size_t save = pos_;
    bool ok = false;
    try {
      next();
      const bool primitive = cur().kind == TokenKind::Keyword && java::is_primitive_type(cur().text);
      if (primitive || is_ident()) {
        type();
        while (pending_closers_ == 0 && is("&")) {
          next();
          type();
        }
        if (pending_closers_ == 0 && is(")")) {
          next();
          const Token& t = cur();
          if (primitive) {
            ok = true;
          } else {
            ok = t.kind == TokenKind::Identifier || t.kind == TokenKind::StringLiteral ||
                 t.kind == TokenKind::CharLiteral || t.kind == TokenKind::IntLiteral ||
                 t.kind == TokenKind::FloatLiteral ||
                 (t.kind == TokenKind::Keyword &&
                  (t.text == "this" || t.text == "super" || t.text == "new" || t.text == "true" ||
                   t.text == "false" || t.text == "null" || java::is_primitive_type(t.text))) ||
                 (t.kind == TokenKind::Punct && (t.text == "(" || t.text == "!" || t.text == "~"));
          }
        }
      }
    } catch (const ParseError&) {
      ok = false;
    }
    pending_closers_ = 0;
    pos_ = save;
    return ok;
  }

  AstNode unary() {
    if (cur().kind == TokenKind::Punct) {
      const std::string op = cur().text;
      if (op == "+" || op == "-" || op == "!" || op == "~" || op == "++" || op == "--") {
        next();
        return AstNode::inner((op == "++" || op == "--" ? "PreIncDec:" : "Unary:") + op, {unary()});
      }
      if (op == "(" && cast_ahead()) {
        next();
        AstNode t = type();
        AstNode cast = AstNode::inner("Cast", {std::move(t)});
        while (is("&")) {
          next();
          cast.children.push_back(type());
        }
        expect(")");
        cast.children.push_back(lambda_ahead() ? lambda() : unary());
        return cast;
      }
    }
    AstNode e = postfix(primary());
    while (is("++") || is("--")) e = AstNode::inner("PostIncDec:" + next().text, {std::move(e)});
    return e;
  }

  AstNode arguments() {
    AstNode args = AstNode::inner("Args");
    expect("(");
    while (!is(")")) {
      args.children.push_back(expression());
      if (is(",")) next();
      else if (!is(")")) fail("expected ',' or ')' in arguments");
    }
    next();
    return args;
  }

  // Calls carry their arguments as trailing children: Call[target?, MethodName, args...].
  static AstNode make_call(std::vector<AstNode> head, AstNode args) {
    AstNode call = AstNode::inner("Call", std::move(head));
    for (auto& a : args.children) call.children.push_back(std::move(a));
    return call;
  }

  AstNode primary() {
    const Token& t = cur();
    switch (t.kind) {
      case TokenKind::IntLiteral:
      case TokenKind::FloatLiteral:
      case TokenKind::StringLiteral:
      case TokenKind::CharLiteral:
        return AstNode::terminal("Literal", next().text);
      case TokenKind::Identifier: {
        if (look(1).text == "(") {
          AstNode m = name("MethodName");
          return make_call({std::move(m)}, arguments());
        }
        return name();
      }
      case TokenKind::Keyword: {
        if (t.text == "true" || t.text == "false" || t.text == "null") return AstNode::terminal("Literal", next().text);
        if (t.text == "this") {
          next();
          if (is("(")) return make_call({AstNode::terminal("This", "this")}, arguments());
          return AstNode::terminal("This", "this");
        }
        if (t.text == "super") {
          next();
          if (is("(")) return make_call({AstNode::terminal("Super", "super")}, arguments());
          return AstNode::terminal("Super", "super");
        }
        if (t.text == "new") return creation();
        if (java::is_primitive_type(t.text) || t.text == "void") {
          // int.class, int[].class
          AstNode ty = type();
          expect(".");
          expect_kw("class");
          return AstNode::inner("ClassLit", {std::move(ty)});
        }
        break;
      }
      case TokenKind::Punct:
        if (t.text == "(") {
          next();
          AstNode e = expression();
          expect(")");
          return AstNode::inner("Paren", {std::move(e)});
        }
        break;
      case TokenKind::End:
        break;
    }
    fail("unexpected token in expression");
  }

  AstNode postfix(AstNode e) {
    while (true) {
      if (is(".")) {
        next();
        if (is("<")) type_arguments();  // explicit generic call arguments are dropped
        if (is_kw("class")) {
          next();
          e = AstNode::inner("ClassLit", {std::move(e)});
          continue;
        }
        if (is_kw("this")) {
          next();
          e = AstNode::inner("FieldAccess", {std::move(e), AstNode::terminal("This", "this")});
          continue;
        }
        if (is_kw("new")) {
          e = AstNode::inner("QualifiedNew", {std::move(e), creation()});
          continue;
        }
        if (is_kw("super")) {
          next();
          e = AstNode::inner("FieldAccess", {std::move(e), AstNode::terminal("Super", "super")});
          continue;
        }
        if (is_ident() && look(1).text == "(") {
          AstNode m = name("MethodName");
          e = make_call({std::move(e), std::move(m)}, arguments());
          continue;
        }
        e = AstNode::inner("FieldAccess", {std::move(e), name()});
        continue;
      }
      if (is("[")) {
        next();
        if (is("]")) {  // Foo[].class
          next();
          e = AstNode::inner("ArrayType", {std::move(e)});
          continue;
        }
        AstNode idx = expression();
        expect("]");
        e = AstNode::inner("ArrayAccess", {std::move(e), std::move(idx)});
        continue;
      }
      if (is("::")) {
        next();
        AstNode target = is_kw("new") ? (next(), AstNode::inner("New")) : name("MethodName");
        e = AstNode::inner("MethodRef", {std::move(e), std::move(target)});
        continue;
      }
      return e;
    }
  }

  AstNode array_initializer() {
    AstNode init = AstNode::inner("ArrayInit");
    expect("{");
    while (!is("}")) {
      init.children.push_back(is("{") ? array_initializer() : expression());
      if (is(",")) next();
      else if (!is("}")) fail("expected ',' or '}' in array initializer");
    }
    next();
    return init;
  }

  AstNode creation() {
    expect_kw("new");
    skip_annotations();
    AstNode t;
    if (cur().kind == TokenKind::Keyword && java::is_primitive_type(cur().text)) {
      t = AstNode::terminal("Type", next().text);
    } else {
      t = class_type();
    }
    if (is("[")) {
      AstNode arr = AstNode::inner("NewArray", {std::move(t)});
      while (is("[")) {
        next();
        if (is("]")) {
          next();
          arr.children.push_back(AstNode::inner("Dim"));
        } else {
          arr.children.push_back(AstNode::inner("Dim", {expression()}));
          expect("]");
        }
      }
      if (is("{")) arr.children.push_back(array_initializer());
      return arr;
    }
    AstNode n = AstNode::inner("New", {std::move(t)});
    for (auto& a : arguments().children) n.children.push_back(std::move(a));
    if (is("{")) n.children.push_back(anonymous_body());
    return n;
  }

  AstNode anonymous_body() {
    AstNode body = AstNode::inner("ClassBody");
    expect("{");
    while (!is("}")) {
      if (at_end()) fail("unterminated class body");
      if (is(";")) {
        next();
        continue;
      }
      while (true) {
        skip_annotations();
        if (cur().kind == TokenKind::Keyword &&
            (cur().text == "public" || cur().text == "private" || cur().text == "protected" ||
             cur().text == "static" || cur().text == "final" || cur().text == "synchronized")) {
          next();
        } else {
          break;
        }
      }
      if (is("{")) {
        body.children.push_back(block());
        continue;
      }
      AstNode ret = type();
      AstNode nm = name();
      if (is("(")) {
        AstNode m = AstNode::inner("Method", {std::move(ret), std::move(nm)});
        next();
        while (!is(")")) {
          skip_local_modifiers();
          AstNode p = AstNode::inner("Param", {type()});
          if (is("...")) {
            next();
            p.kind = "VarArgParam";
          }
          p.children.push_back(name());
          m.children.push_back(std::move(p));
          if (is(",")) next();
          else if (!is(")")) fail("expected ',' or ')' in parameters");
        }
        next();
        if (is_kw("throws")) {
          next();
          AstNode th = AstNode::inner("Throws", {type()});
          while (is(",")) {
            next();
            th.children.push_back(type());
          }
          m.children.push_back(std::move(th));
        }
        m.children.push_back(block());
        body.children.push_back(std::move(m));
      } else {
        AstNode f = AstNode::inner("Field", {std::move(ret), std::move(nm)});
        if (is("=")) {
          next();
          f.children.push_back(is("{") ? array_initializer() : expression());
        }
        expect(";");
        body.children.push_back(std::move(f));
      }
    }
    next();
    return body;
  }

  java::TokenStream ts_;
  std::size_t pos_ = 0;
};

void sexpr(const AstNode& n, std::string& out) {
  if (n.is_terminal()) {
    out += n.kind + "(" + n.token + ")";
    return;
  }
  out += "(" + n.kind;
  for (const auto& c : n.children) {
    out += ' ';
    sexpr(c, out);
  }
  out += ")";
}

}  // namespace

AstNode parse_method_body(std::string_view body) { return BodyParser(body).run(); }

AstNode build_ast(const MethodRecord& record) { return parse_method_body(record.body); }

std::size_t count_terminals(const AstNode& root) {
  if (root.is_terminal()) return 1;
  std::size_t n = 0;
  for (const auto& c : root.children) n += count_terminals(c);
  return n;
}

std::size_t count_nodes(const AstNode& root) {
  std::size_t n = 1;
  for (const auto& c : root.children) n += count_nodes(c);
  return n;
}

std::string to_sexpr(const AstNode& root) {
  std::string out;
  sexpr(root, out);
  return out;
}

}  // namespace apisift
