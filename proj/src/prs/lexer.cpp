#include "rxo/prs/lexer.hpp"

#include "rxo/error.hpp"

#include <cctype>

namespace rxo {

bool Token::is_keyword(std::string_view kw) const {
  if (kind != TokenKind::Ident || text.size() != kw.size()) return false;
  for (std::size_t i = 0; i < kw.size(); ++i)
    if (std::toupper(static_cast<unsigned char>(text[i])) != std::toupper(static_cast<unsigned char>(kw[i])))
      return false;
  return true;
}

std::string position_of(const Token& t) {
  return "line " + std::to_string(t.line) + ", column " + std::to_string(t.column);
}

std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  int line = 1, col = 1;
  bool space = false;
  auto advance = [&](std::size_t n = 1) {
    for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  auto is_ident_start = [](char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; };
  auto is_ident_char = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; };

  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance();
      space = true;
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') advance();
      space = true;
      continue;
    }
    Token t;
    t.offset = i;
    t.line = line;
    t.column = col;
    t.space_before = space || out.empty();
    space = false;
    auto lex_error = [&](const std::string& msg) {
      fail(ErrorCode::SyntaxError, msg + " at " + position_of(t));
    };

    if (is_ident_start(c)) {
      std::size_t start = i;
      while (i < src.size() && is_ident_char(src[i])) advance();
      t.kind = TokenKind::Ident;
      t.text = std::string(src.substr(start, i - start));
    } else if (c == '#' && i + 1 < src.size() && is_ident_start(src[i + 1])) {
      std::size_t start = i;
      advance();
      while (i < src.size() && is_ident_char(src[i])) advance();
      t.kind = TokenKind::Alias;
      t.text = std::string(src.substr(start, i - start));
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = i;
      while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) advance();
      t.kind = TokenKind::Integer;
      if (i + 1 < src.size() && src[i] == '.' && std::isdigit(static_cast<unsigned char>(src[i + 1]))) {
        advance();
        while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) advance();
        t.kind = TokenKind::Float;
      }
      if (i < src.size() && (src[i] == 'e' || src[i] == 'E')) {
        std::size_t save = i;
        int sl = line, sc = col;
        advance();
        if (i < src.size() && (src[i] == '+' || src[i] == '-')) advance();
        if (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) {
          while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) advance();
          t.kind = TokenKind::Float;
        } else {
          i = save;
          line = sl;
          col = sc;
        }
      }
      t.text = std::string(src.substr(start, i - start));
    } else if (c == '"' || c == '\'' || c == '`') {
      char quote = c;
      advance();
      std::string value;
      bool closed = false;
      while (i < src.size()) {
        char d = src[i];
        if (d == quote) {
          advance();
          closed = true;
          break;
        }
        if (d == '\\' && i + 1 < src.size()) {
          char e = src[i + 1];
          advance(2);
          switch (e) {
          case 'n': value += '\n'; break;
          case 't': value += '\t'; break;
          default: value += e;
          }
          continue;
        }
        value += d;
        advance();
      }
      if (!closed) lex_error("unterminated quoted text");
      t.kind = quote == '`' ? TokenKind::QuotedIdent : TokenKind::String;
      t.text = std::move(value);
    } else {
      static const char* two[] = {":=", "<>", "!=", "<=", ">="};
      t.kind = TokenKind::Symbol;
      for (const char* s : two) {
        if (src.substr(i, 2) == s) {
          t.text = s;
          break;
        }
      }
      if (t.text.empty()) {
        if (std::string_view("()[]{},;.:=<>+-*/'").find(c) == std::string_view::npos)
          lex_error(std::string("unexpected character '") + c + "'");
        t.text = std::string(1, c);
      }
      advance(t.text.size());
    }
    t.end = i;
    out.push_back(std::move(t));
  }
  Token end;
  end.kind = TokenKind::End;
  end.offset = src.size();
  end.end = src.size();
  end.line = line;
  end.column = col;
  end.space_before = true;
  out.push_back(end);
  return out;
}

const Token& TokenCursor::peek(std::size_t ahead) const {
  std::size_t p = pos_ + ahead;
  return p < tokens_.size() ? tokens_[p] : tokens_.back();
}

const Token& TokenCursor::next() {
  const Token& t = peek();
  if (pos_ < tokens_.size() - 1) ++pos_;
  return t;
}

bool TokenCursor::accept_symbol(std::string_view s) {
  if (!peek().is_symbol(s)) return false;
  next();
  return true;
}

bool TokenCursor::accept_keyword(std::string_view kw) {
  if (!peek().is_keyword(kw)) return false;
  next();
  return true;
}

const Token& TokenCursor::expect_symbol(std::string_view s) {
  if (!peek().is_symbol(s)) error("expected '" + std::string(s) + "'");
  return next();
}

const Token& TokenCursor::expect_keyword(std::string_view kw) {
  if (!peek().is_keyword(kw)) error("expected " + std::string(kw));
  return next();
}

std::string TokenCursor::expect_identifier(std::string_view what) {
  const Token& t = peek();
  if (t.kind != TokenKind::Ident && t.kind != TokenKind::QuotedIdent) error("expected " + std::string(what));
  return next().text;
}

void TokenCursor::error(const std::string& message) const { error_at(peek(), message); }

void TokenCursor::error_at(const Token& t, const std::string& message) const {
  std::string found = t.kind == TokenKind::End ? "end of input" : "'" + t.text + "'";
  ErrorCode code = t.kind == TokenKind::End ? ErrorCode::UnterminatedCommand : ErrorCode::SyntaxError;
  fail(code, message + " but found " + found + " at " + position_of(t));
}

} // namespace rxo
