#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "simdcc/diagnostics.hpp"

namespace simdcc {

enum class TokenKind {
  Identifier,
  Keyword,
  IntLiteral,
  FloatLiteral,
  StringLiteral,
  Punctuator,
  End,
};

struct Token {
  TokenKind kind = TokenKind::End;
  std::string text;  // exact source spelling (string literals keep their quotes)
  SourceLoc loc;

  bool is(TokenKind k) const { return kind == k; }
  bool is(TokenKind k, std::string_view t) const { return kind == k && text == t; }
  bool is_punct(std::string_view t) const { return is(TokenKind::Punctuator, t); }
  bool is_keyword(std::string_view t) const { return is(TokenKind::Keyword, t); }
};

const char* token_kind_name(TokenKind kind);

bool is_keyword(std::string_view word);

/// Splits source text into tokens. `//` and `/* */` comments are dropped.
/// The result always ends with a single End token.
std::vector<Token> tokenize(std::string_view source);

}  // namespace simdcc
