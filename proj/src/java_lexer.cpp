#include "apisift/java_lexer.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "apisift/error.hpp"

namespace apisift::java {
namespace {

constexpr std::array<std::string_view, 53> kKeywords{
    "abstract", "assert",     "boolean",  "break",     "byte",         "case",      "catch",   "char",
    "class",    "const",      "continue", "default",   "do",           "double",    "else",    "enum",
    "extends",  "final",      "finally",  "float",     "for",          "goto",      "if",      "implements",
    "import",   "instanceof", "int",      "interface", "long",         "native",    "new",     "package",
    "private",  "protected",  "public",   "return",    "short",        "static",    "strictfp", "super",
    "switch",   "synchronized", "this",   "throw",     "throws",       "transient", "try",     "void",
    "volatile", "while",      "true",     "false",     "null"};

constexpr std::array<std::string_view, 8> kPrimitives{"boolean", "byte", "char", "short",
                                                      "int",     "long", "float", "double"};

// Longest first so that greedy matching works.
constexpr std::array<std::string_view, 50> kPuncts{
    ">>>=", "<<=", ">>=", ">>>", "...", "->", "::", "++", "--", "&&", "||", "==", "!=", "<=", ">=",
    "+=",   "-=",  "*=",  "/=",  "%=",  "&=", "|=", "^=", "<<", ">>", "(",  ")",  "{",  "}",  "[",
    "]",    ";",   ",",   ".",   "@",   "=",  ">",  "<",  "!",  "~",  "?",  ":",  "+",  "-",  "*",
    "/",    "&",   "|",   "^",   "%"};

bool ident_start(unsigned char c) { return std::isalpha(c) || c == '_' || c == '$' || c >= 0x80; }
bool ident_part(unsigned char c) { return ident_start(c) || std::isdigit(c); }

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  TokenStream run() {
    TokenStream out;
    std::optional<std::size_t> pending_doc;
    while (true) {
      skip_space_and_comments(out, pending_doc);
      if (pos_ >= src_.size()) break;
      Token t = next_token();
      t.doc = pending_doc;
      pending_doc.reset();
      out.tokens.push_back(std::move(t));
    }
    Token end;
    end.kind = TokenKind::End;
    end.line = line_;
    end.column = col_;
    end.offset = end.end = src_.size();
    end.doc = pending_doc;
    out.tokens.push_back(std::move(end));
    return out;
  }

 private:
  char peek(std::size_t ahead = 0) const { return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0'; }

  void advance(std::size_t n = 1) {
    for (std::size_t i = 0; i < n && pos_ < src_.size(); ++i) {
      if (src_[pos_] == '\n') {
        ++line_;
        col_ = 1;
      } else {
        ++col_;
      }
      ++pos_;
    }
  }

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, line_, col_); }

  void skip_space_and_comments(TokenStream& out, std::optional<std::size_t>& pending_doc) {
    while (pos_ < src_.size()) {
      const char c = peek();
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == '/' && peek(1) == '/') {
        while (pos_ < src_.size() && peek() != '\n') advance();
      } else if (c == '/' && peek(1) == '*') {
        const std::size_t start = pos_;
        const std::size_t start_line = line_;
        const bool is_doc = peek(2) == '*' && peek(3) != '/';
        advance(2);
        while (pos_ < src_.size() && !(peek() == '*' && peek(1) == '/')) advance();
        if (pos_ >= src_.size()) fail("unterminated comment");
        advance(2);
        if (is_doc) {
          out.docs.push_back(DocComment{std::string(src_.substr(start, pos_ - start)), start_line});
          pending_doc = out.docs.size() - 1;
        }
      } else {
        break;
      }
    }
  }

  Token next_token() {
    Token t;
    t.line = line_;
    t.column = col_;
    t.offset = pos_;
    const auto c = static_cast<unsigned char>(peek());
    if (ident_start(c)) {
      while (pos_ < src_.size() && ident_part(static_cast<unsigned char>(peek()))) advance();
      t.text = std::string(src_.substr(t.offset, pos_ - t.offset));
      t.kind = is_keyword(t.text) ? TokenKind::Keyword : TokenKind::Identifier;
    } else if (std::isdigit(c) || (c == '.' && std::isdigit(static_cast<unsigned char>(peek(1))))) {
      t.kind = lex_number();
      t.text = std::string(src_.substr(t.offset, pos_ - t.offset));
    } else if (c == '"' || c == '\'') {
      lex_quoted(static_cast<char>(c));
      t.kind = c == '"' ? TokenKind::StringLiteral : TokenKind::CharLiteral;
      t.text = std::string(src_.substr(t.offset, pos_ - t.offset));
    } else {
      const auto rest = src_.substr(pos_);
      const auto it = std::find_if(kPuncts.begin(), kPuncts.end(),
                                   [&](std::string_view p) { return rest.starts_with(p); });
      if (it == kPuncts.end()) fail(std::string("unexpected character '") + static_cast<char>(c) + "'");
      advance(it->size());
      t.kind = TokenKind::Punct;
      t.text = std::string(*it);
    }
    t.end = pos_;
    return t;
  }

  TokenKind lex_number() {
    bool is_float = false;
    if (peek() == '0' && (peek(1) == 'x' || peek(1) == 'X' || peek(1) == 'b' || peek(1) == 'B')) {
      advance(2);
      while (std::isxdigit(static_cast<unsigned char>(peek())) || peek() == '_') advance();
    } else {
      while (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '_') advance();
      if (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
        is_float = true;
        advance();
        while (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '_') advance();
      } else if (peek() == '.' && !std::isalpha(static_cast<unsigned char>(peek(1))) && peek(1) != '.') {
        is_float = true;
        advance();
      }
      if (peek() == 'e' || peek() == 'E') {
        is_float = true;
        advance();
        if (peek() == '+' || peek() == '-') advance();
        while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
      }
    }
    const char suffix = peek();
    if (suffix == 'f' || suffix == 'F' || suffix == 'd' || suffix == 'D') {
      is_float = true;
      advance();
    } else if (suffix == 'l' || suffix == 'L') {
      advance();
    }
    return is_float ? TokenKind::FloatLiteral : TokenKind::IntLiteral;
  }

  void lex_quoted(char quote) {
    advance();
    while (true) {
      if (pos_ >= src_.size() || peek() == '\n') fail("unterminated literal");
      if (peek() == '\\') {
        advance(2);
        continue;
      }
      if (peek() == quote) {
        advance();
        return;
      }
      advance();
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

}  // namespace

TokenStream tokenize(std::string_view source) { return Lexer(source).run(); }

bool is_keyword(std::string_view word) {
  return std::find(kKeywords.begin(), kKeywords.end(), word) != kKeywords.end();
}

bool is_primitive_type(std::string_view word) {
  return std::find(kPrimitives.begin(), kPrimitives.end(), word) != kPrimitives.end();
}

std::string clean_doc_comment(std::string_view raw) {
  std::string_view body = raw;
  if (body.starts_with("/**")) body.remove_prefix(3);
  if (body.ends_with("*/")) body.remove_suffix(2);

  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start <= body.size()) {
    const std::size_t nl = body.find('\n', start);
    std::string_view line = body.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
    std::string t = trim(line);
    if (!t.empty() && t.front() == '*') t = trim(std::string_view(t).substr(1));
    lines.push_back(std::move(t));
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
  while (!lines.empty() && lines.front().empty()) lines.erase(lines.begin());
  while (!lines.empty() && lines.back().empty()) lines.pop_back();

  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i) out += '\n';
    out += lines[i];
  }
  return out;
}

}  // namespace apisift::java
