#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "alloysmt/ast.hpp"

namespace alloysmt {

enum class TokenKind {
  Identifier,
  Number,
  Keyword,
  // punctuation
  LBrace,
  RBrace,
  LParen,
  RParen,
  LBracket,
  RBracket,
  Comma,
  Colon,
  Bar,
  Dot,
  Arrow,      // ->
  Plus,
  Minus,
  Amp,        // &
  Caret,      // ^
  Star,       // *
  Tilde,      // ~
  Hash,       // #
  Equal,      // =
  NotEqual,   // !=
  Bang,       // !
  AndAnd,     // &&
  OrOr,       // ||
  FatArrow,   // =>
  Iff,        // <=>
  Less,
  Greater,
  LessEq,     // =<
  GreaterEq,  // >=
  PlusPlus,   // ++
  LeftRestrict,   // <:
  RightRestrict,  // :>
  End,
};

struct Token {
  TokenKind kind = TokenKind::End;
  std::string text;
  Pos pos;

  bool is_keyword(std::string_view kw) const { return kind == TokenKind::Keyword && text == kw; }
};

/// Splits `source` into tokens. Comments (`--`, `//`, `/* */`) are dropped. The final
/// token is always `End`. Throws Error(Lexical) on an illegal character.
std::vector<Token> tokenize(std::string_view source);

bool is_keyword(std::string_view word);
std::string_view describe(TokenKind kind);

}  // namespace alloysmt
