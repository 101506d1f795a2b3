#include "simdcc/lexer.hpp"

#include <array>
#include <cctype>
#include <cstdint>
#include <limits>

namespace simdcc {

namespace {

constexpr std::array<std::string_view, 21> kKeywords = {
    "int",    "float", "double",  "complex", "vector", "localint", "struct",
    "class",  "union", "public",  "private", "typedef", "const",   "if",
    "else",   "where", "elsewhere", "for",   "while",  "return",   "void",
};

// Longest match first.
constexpr std::array<std::string_view, 41> kPunctuators = {
    "<<=", ">>=", "->", "++", "--", "<<", ">>", "<=", ">=", "==", "!=",
    "&&",  "||",  "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "::",
    "(",   ")",   "[",  "]",  "{",  "}",  ";",  ",",  ".",  "+",  "-",
    "*",   "/",   "%",  "=",  "<",  ">",  "!",  "~",
};
constexpr std::array<std::string_view, 5> kSingleExtra = {"&", "|", "^", "?", ":"};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool digit(char c) { return c >= '0' && c <= '9'; }

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_trivia();
      if (pos_ >= src_.size()) break;
      out.push_back(next());
    }
    out.push_back(Token{TokenKind::End, "", here()});
    return out;
  }

 private:
  SourceLoc here() const { return {line_, col_}; }

  char peek(size_t ahead = 0) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_trivia() {
    while (pos_ < src_.size()) {
      char c = peek();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v') {
        advance();
      } else if (c == '/' && peek(1) == '/') {
        while (pos_ < src_.size() && peek() != '\n') advance();
      } else if (c == '/' && peek(1) == '*') {
        SourceLoc start = here();
        advance();
        advance();
        while (pos_ < src_.size() && !(peek() == '*' && peek(1) == '/')) advance();
        if (pos_ >= src_.size()) throw LexError(start, "unterminated block comment");
        advance();
        advance();
      } else {
        break;
      }
    }
  }

  Token next() {
    SourceLoc loc = here();
    size_t start = pos_;
    char c = peek();
    if (ident_start(c)) {
      while (ident_char(peek())) advance();
      std::string text(src_.substr(start, pos_ - start));
      TokenKind kind = is_keyword(text) ? TokenKind::Keyword : TokenKind::Identifier;
      return Token{kind, std::move(text), loc};
    }
    if (digit(c) || (c == '.' && digit(peek(1)))) return number(loc);
    if (c == '"') return string_literal(loc);
    for (std::string_view p : kPunctuators) {
      if (src_.substr(pos_, p.size()) == p) {
        for (size_t i = 0; i < p.size(); ++i) advance();
        return Token{TokenKind::Punctuator, std::string(p), loc};
      }
    }
    for (std::string_view p : kSingleExtra) {
      if (c == p[0]) {
        advance();
        return Token{TokenKind::Punctuator, std::string(p), loc};
      }
    }
    throw LexError(loc, std::string("unrecognized character '") + c + "'");
  }

  Token number(SourceLoc loc) {
    size_t start = pos_;
    bool is_float = false;
    if (peek() == '0' && (peek(1) == 'x' || peek(1) == 'X')) {
      advance();
      advance();
      if (!std::isxdigit(static_cast<unsigned char>(peek())))
        throw LexError(loc, "malformed hexadecimal literal");
      while (std::isxdigit(static_cast<unsigned char>(peek()))) advance();
    } else {
      while (digit(peek())) advance();
      if (peek() == '.') {
        is_float = true;
        advance();
        while (digit(peek())) advance();
      }
      if (peek() == 'e' || peek() == 'E') {
        is_float = true;
        advance();
        if (peek() == '+' || peek() == '-') advance();
        if (!digit(peek())) throw LexError(loc, "malformed exponent in numeric literal");
        while (digit(peek())) advance();
      }
      if (is_float && (peek() == 'f' || peek() == 'F')) advance();
    }
    if (ident_char(peek())) throw LexError(loc, "malformed numeric literal");
    std::string text(src_.substr(start, pos_ - start));
    if (!is_float) {
      std::uint64_t value = 0;
      bool hex = text.size() > 2 && (text[1] == 'x' || text[1] == 'X');
      for (size_t i = hex ? 2 : 0; i < text.size(); ++i) {
        char d = text[i];
        unsigned v = digit(d) ? unsigned(d - '0')
                              : unsigned(std::tolower(static_cast<unsigned char>(d)) - 'a' + 10);
        value = value * (hex ? 16 : 10) + v;
        if (value > static_cast<std::uint64_t>(std::numeric_limits<std::int32_t>::max()))
          throw LexError(loc, "integer literal does not fit in 32 bits");
      }
      return Token{TokenKind::IntLiteral, std::move(text), loc};
    }
    return Token{TokenKind::FloatLiteral, std::move(text), loc};
  }

  Token string_literal(SourceLoc loc) {
    size_t start = pos_;
    advance();
    while (pos_ < src_.size() && peek() != '"') {
      if (peek() == '\n') throw LexError(loc, "newline in string literal");
      if (peek() == '\\') advance();
      if (pos_ < src_.size()) advance();
    }
    if (pos_ >= src_.size()) throw LexError(loc, "unterminated string literal");
    advance();
    return Token{TokenKind::StringLiteral, std::string(src_.substr(start, pos_ - start)), loc};
  }

  std::string_view src_;
  size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

}  // namespace

const char* token_kind_name(TokenKind kind) {
  switch (kind) {
    case TokenKind::Identifier: return "identifier";
    case TokenKind::Keyword: return "keyword";
    case TokenKind::IntLiteral: return "integer literal";
    case TokenKind::FloatLiteral: return "float literal";
    case TokenKind::StringLiteral: return "string literal";
    case TokenKind::Punctuator: return "punctuator";
    case TokenKind::End: return "end of input";
  }
  return "?";
}

bool is_keyword(std::string_view word) {
  for (std::string_view k : kKeywords)
    if (k == word) return true;
  return false;
}

std::vector<Token> tokenize(std::string_view source) { return Lexer(source).run(); }

}  // namespace simdcc
