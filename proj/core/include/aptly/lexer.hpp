#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "aptly/diagnostic.hpp"

namespace aptly {

enum class TokenKind { Identifier, Keyword, Number, String, Punct, Newline, Indent, Dedent, Eof };

struct Token {
  TokenKind kind = TokenKind::Eof;
  std::string text;  // decoded contents for strings
  SourceSpan span;

  bool is(TokenKind k, std::string_view t) const { return kind == k && text == t; }
  bool is_punct(std::string_view t) const { return is(TokenKind::Punct, t); }
  bool is_keyword(std::string_view t) const { return is(TokenKind::Keyword, t); }
};

std::string_view token_kind_name(TokenKind kind);

bool is_keyword(std::string_view word);

/// ASCII identifier that is not a keyword.
bool is_identifier(std::string_view text);

/// `-?digits(.digits)?`, the only number spelling the lexer produces.
bool is_number_text(std::string_view text);

/// Python-style indentation from leading spaces; newlines inside brackets
/// are joined. Tabs outside string literals are rejected.
Outcome<std::vector<Token>> tokenize(std::string_view source);

}  // namespace aptly
