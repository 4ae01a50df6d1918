#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace rxo {

enum class TokenKind { Ident, QuotedIdent, Alias, Integer, Float, String, Symbol, End };

struct Token {
  TokenKind kind = TokenKind::End;
  std::string text; // identifier, symbol, or decoded literal
  std::size_t offset = 0;
  std::size_t end = 0; // one past the last source character
  int line = 1;
  int column = 1;
  bool space_before = false;

  bool is_symbol(std::string_view s) const { return kind == TokenKind::Symbol && text == s; }
  /// Case-insensitive keyword test on plain identifiers.
  bool is_keyword(std::string_view kw) const;
};

/// Tokenizes both the machine language and the object language. `//` starts
/// a line comment. Throws SyntaxError on malformed literals.
std::vector<Token> tokenize(std::string_view text);

std::string position_of(const Token& t);

/// Shared cursor over a token vector.
class TokenCursor {
public:
  explicit TokenCursor(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  const Token& peek(std::size_t ahead = 0) const;
  const Token& next();
  bool at_end() const { return peek().kind == TokenKind::End; }
  std::size_t position() const { return pos_; }
  void rewind(std::size_t pos) { pos_ = pos; }
  /// Last consumed token; requires position() > 0.
  const Token& previous() const { return tokens_[pos_ - 1]; }

  bool accept_symbol(std::string_view s);
  bool accept_keyword(std::string_view kw);
  const Token& expect_symbol(std::string_view s);
  const Token& expect_keyword(std::string_view kw);
  /// Plain or backtick-quoted identifier.
  std::string expect_identifier(std::string_view what);

  [[noreturn]] void error(const std::string& message) const;
  [[noreturn]] void error_at(const Token& t, const std::string& message) const;

private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

} // namespace rxo
