#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace apisift::java {

enum class TokenKind { Identifier, Keyword, IntLiteral, FloatLiteral, StringLiteral, CharLiteral, Punct, End };

struct Token {
  TokenKind kind = TokenKind::End;
  std::string text;
  std::size_t line = 1;
  std::size_t column = 1;
  std::size_t offset = 0;  // byte offset of the first character
  std::size_t end = 0;     // byte offset one past the last character
  /// Index into TokenStream::docs of the closest `/** */` comment between the
  /// previous token and this one.
  std::optional<std::size_t> doc;
};

struct DocComment {
  std::string raw;  // including the delimiters
  std::size_t line = 1;
};

struct TokenStream {
  std::vector<Token> tokens;  // always terminated by an End token
  std::vector<DocComment> docs;
};

/// Tokenizes Java-like source. Line and block comments are dropped; doc
/// comments are kept out of band and linked to the token that follows them.
/// Throws ParseError on unterminated literals or comments and stray characters.
TokenStream tokenize(std::string_view source);

bool is_keyword(std::string_view word);
bool is_primitive_type(std::string_view word);

/// Removes the comment delimiters and the leading `*` gutter, trims every
/// line, drops empty leading/trailing lines and joins the rest with '\n'.
std::string clean_doc_comment(std::string_view raw);

}  // namespace apisift::java
