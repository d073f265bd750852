#include "alloysmt/lexer.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "alloysmt/diagnostics.hpp"

namespace alloysmt {

namespace {

constexpr std::array kKeywords = {
    "abstract", "all",   "and",    "assert", "but",    "check", "disj",  "else",
    "enum",     "exactly", "extends", "fact", "false",  "for",   "fun",   "iden",
    "iff",      "implies", "in",   "Int",    "let",    "lone",  "module", "no",
    "none",     "not",   "one",    "open",   "or",     "pred",  "run",   "set",
    "sig",      "some",  "sum",    "this",   "true",   "univ",
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }

bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'' || c == '"';
}

struct Punct {
  std::string_view text;
  TokenKind kind;
};

// Longest match first.
constexpr std::array kPunct = {
    Punct{"<=>", TokenKind::Iff},        Punct{"->", TokenKind::Arrow},
    Punct{"=>", TokenKind::FatArrow},    Punct{"!=", TokenKind::NotEqual},
    Punct{"&&", TokenKind::AndAnd},      Punct{"||", TokenKind::OrOr},
    Punct{"=<", TokenKind::LessEq},      Punct{">=", TokenKind::GreaterEq},
    Punct{"++", TokenKind::PlusPlus},    Punct{"<:", TokenKind::LeftRestrict},
    Punct{":>", TokenKind::RightRestrict}, Punct{"{", TokenKind::LBrace},
    Punct{"}", TokenKind::RBrace},       Punct{"(", TokenKind::LParen},
    Punct{")", TokenKind::RParen},       Punct{"[", TokenKind::LBracket},
    Punct{"]", TokenKind::RBracket},     Punct{",", TokenKind::Comma},
    Punct{":", TokenKind::Colon},        Punct{"|", TokenKind::Bar},
    Punct{".", TokenKind::Dot},          Punct{"+", TokenKind::Plus},
    Punct{"-", TokenKind::Minus},        Punct{"&", TokenKind::Amp},
    Punct{"^", TokenKind::Caret},        Punct{"*", TokenKind::Star},
    Punct{"~", TokenKind::Tilde},        Punct{"#", TokenKind::Hash},
    Punct{"=", TokenKind::Equal},        Punct{"!", TokenKind::Bang},
    Punct{"<", TokenKind::Less},         Punct{">", TokenKind::Greater},
};

}  // namespace

bool is_keyword(std::string_view word) {
  return std::find(kKeywords.begin(), kKeywords.end(), word) != kKeywords.end();
}

std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  int line = 1;
  int col = 1;

  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };

  while (i < src.size()) {
    const char c = src[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f') {
      advance(1);
      continue;
    }
    const std::string_view rest = src.substr(i);
    if (rest.starts_with("--") || rest.starts_with("//")) {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    if (rest.starts_with("/*")) {
      const Pos start{line, col};
      const auto close = rest.find("*/", 2);
      if (close == std::string_view::npos) {
        throw Error(ErrorKind::Lexical, "unterminated block comment", start);
      }
      advance(close + 2);
      continue;
    }

    const Pos pos{line, col};
    if (ident_start(c)) {
      std::size_t n = 1;
      while (n < rest.size() && ident_char(rest[n])) ++n;
      std::string word(rest.substr(0, n));
      const auto kind = is_keyword(word) ? TokenKind::Keyword : TokenKind::Identifier;
      out.push_back({kind, std::move(word), pos});
      advance(n);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t n = 1;
      while (n < rest.size() && std::isdigit(static_cast<unsigned char>(rest[n]))) ++n;
      out.push_back({TokenKind::Number, std::string(rest.substr(0, n)), pos});
      advance(n);
      continue;
    }
    bool matched = false;
    for (const auto& p : kPunct) {
      if (rest.starts_with(p.text)) {
        out.push_back({p.kind, std::string(p.text), pos});
        advance(p.text.size());
        matched = true;
        break;
      }
    }
    if (!matched) {
      std::string shown(1, c);
      throw Error(ErrorKind::Lexical, "illegal character '" + shown + "'", pos);
    }
  }
  out.push_back({TokenKind::End, "", Pos{line, col}});
  return out;
}

std::string_view describe(TokenKind kind) {
  switch (kind) {
    case TokenKind::Identifier: return "identifier";
    case TokenKind::Number: return "number";
    case TokenKind::Keyword: return "keyword";
    case TokenKind::LBrace: return "'{'";
    case TokenKind::RBrace: return "'}'";
    case TokenKind::LParen: return "'('";
    case TokenKind::RParen: return "')'";
    case TokenKind::LBracket: return "'['";
    case TokenKind::RBracket: return "']'";
    case TokenKind::Comma: return "','";
    case TokenKind::Colon: return "':'";
    case TokenKind::Bar: return "'|'";
    case TokenKind::Dot: return "'.'";
    case TokenKind::Arrow: return "'->'";
    case TokenKind::Plus: return "'+'";
    case TokenKind::Minus: return "'-'";
    case TokenKind::Amp: return "'&'";
    case TokenKind::Caret: return "'^'";
    case TokenKind::Star: return "'*'";
    case TokenKind::Tilde: return "'~'";
    case TokenKind::Hash: return "'#'";
    case TokenKind::Equal: return "'='";
    case TokenKind::NotEqual: return "'!='";
    case TokenKind::Bang: return "'!'";
    case TokenKind::AndAnd: return "'&&'";
    case TokenKind::OrOr: return "'||'";
    case TokenKind::FatArrow: return "'=>'";
    case TokenKind::Iff: return "'<=>'";
    case TokenKind::Less: return "'<'";
    case TokenKind::Greater: return "'>'";
    case TokenKind::LessEq: return "'=<'";
    case TokenKind::GreaterEq: return "'>='";
    case TokenKind::PlusPlus: return "'++'";
    case TokenKind::LeftRestrict: return "'<:'";
    case TokenKind::RightRestrict: return "':>'";
    case TokenKind::End: return "end of input";
  }
  return "token";
}

}  // namespace alloysmt
