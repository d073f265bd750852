#include "alloysmt/parser.hpp"

#include <fstream>
#include <sstream>

#include "alloysmt/diagnostics.hpp"

namespace alloysmt {

namespace {

bool is_multiplicity_kw(const Token& t) {
  return t.is_keyword("one") || t.is_keyword("lone") || t.is_keyword("some") ||
         t.is_keyword("set");
}

Multiplicity to_multiplicity(const Token& t) {
  if (t.is_keyword("one")) return Multiplicity::One;
  if (t.is_keyword("lone")) return Multiplicity::Lone;
  if (t.is_keyword("some")) return Multiplicity::Some;
  return Multiplicity::Set;
}

bool is_quantifier_kw(const Token& t) {
  return t.is_keyword("all") || t.is_keyword("some") || t.is_keyword("one") ||
         t.is_keyword("lone") || t.is_keyword("no");
}

Quantifier to_quantifier(const Token& t) {
  if (t.is_keyword("all")) return Quantifier::All;
  if (t.is_keyword("some")) return Quantifier::Some;
  if (t.is_keyword("one")) return Quantifier::One;
  if (t.is_keyword("lone")) return Quantifier::Lone;
  return Quantifier::No;
}

bool later(const Pos& a, const Pos& b) {
  return a.line != b.line ? a.line > b.line : a.column > b.column;
}

// Keywords of full Alloy that name a construct outside the subset.
const char* out_of_scope_keyword(const Token& t) {
  if (t.kind != TokenKind::Keyword) return nullptr;
  static const std::pair<const char*, const char*> table[] = {
      {"module", "module declarations"}, {"open", "module imports (open)"},
      {"run", "run commands"},            {"let", "let bindings"},
      {"enum", "enum declarations"},      {"disj", "disjoint declarations (disj)"},
      {"exactly", "exact scopes"},        {"but", "per-type scopes (but)"},
      {"Int", "integers"},                {"sum", "integer sums"},
      {"univ", "the universal relation (univ)"},
      {"none", "the empty relation (none)"},
      {"iden", "the identity relation (iden)"},
      {"this", "the 'this' keyword"},     {"else", "if-then-else formulas"},
  };
  for (const auto& [kw, what] : table) {
    if (t.text == kw) return what;
  }
  return nullptr;
}

const char* out_of_scope_punct(TokenKind k) {
  switch (k) {
    case TokenKind::Tilde: return "transpose (~)";
    case TokenKind::Hash: return "cardinality counting (#)";
    case TokenKind::PlusPlus: return "relational override (++)";
    case TokenKind::LeftRestrict: return "domain restriction (<:)";
    case TokenKind::RightRestrict: return "range restriction (:>)";
    case TokenKind::Less:
    case TokenKind::Greater:
    case TokenKind::LessEq:
    case TokenKind::GreaterEq: return "integer comparison";
    case TokenKind::Number: return "integers";
    default: return nullptr;
  }
}

class Parser {
 public:
  explicit Parser(const std::vector<Token>& tokens) : toks_(tokens) {
    if (toks_.empty() || toks_.back().kind != TokenKind::End) {
      throw Error(ErrorKind::Syntax, "token stream must end with end of input");
    }
  }

  SourceModel model(std::string source_name) {
    SourceModel m;
    m.source_name = std::move(source_name);
    while (!at(TokenKind::End)) paragraph(m);
    return m;
  }

  FormulaPtr single_formula() {
    auto f = formula();
    expect(TokenKind::End, "end of input");
    return f;
  }

  ExprPtr single_expr() {
    auto e = expr();
    expect(TokenKind::End, "end of input");
    return e;
  }

 private:
  const std::vector<Token>& toks_;
  std::size_t i_ = 0;

  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(i_ + ahead, toks_.size() - 1)];
  }
  bool at(TokenKind k) const { return peek().kind == k; }
  bool at_kw(std::string_view kw) const { return peek().is_keyword(kw); }
  const Token& take() {
    const Token& t = peek();
    if (i_ < toks_.size() - 1) ++i_;
    return t;
  }

  static std::string found(const Token& t) {
    if (t.kind == TokenKind::End) return "end of input";
    return "'" + t.text + "'";
  }

  [[noreturn]] void fail(const std::string& expected) const {
    const Token& t = peek();
    if (const char* what = out_of_scope_punct(t.kind)) {
      throw Error(ErrorKind::OutOfScope, what, t.pos);
    }
    if (const char* what = out_of_scope_keyword(t)) {
      throw Error(ErrorKind::OutOfScope, what, t.pos);
    }
    throw Error(ErrorKind::Syntax, "expected " + expected + ", found " + found(t), t.pos);
  }

  const Token& expect(TokenKind k, const std::string& expected) {
    if (!at(k)) fail(expected);
    return take();
  }

  void expect_kw(std::string_view kw) {
    if (!at_kw(kw)) fail("'" + std::string(kw) + "'");
    take();
  }

  const Token& ident() { return expect(TokenKind::Identifier, "identifier"); }

  // ---- paragraphs -------------------------------------------------------

  void paragraph(SourceModel& m) {
    const Token& t = peek();
    if (t.is_keyword("abstract") || t.is_keyword("sig")) {
      sig(m);
    } else if (is_multiplicity_kw(t) && peek(1).is_keyword("sig")) {
      throw Error(ErrorKind::OutOfScope, "signature multiplicities", t.pos);
    } else if (t.is_keyword("fact")) {
      m.paragraphs.emplace_back(fact());
    } else if (t.is_keyword("pred")) {
      m.paragraphs.emplace_back(pred());
    } else if (t.is_keyword("fun")) {
      m.paragraphs.emplace_back(fun());
    } else if (t.is_keyword("assert")) {
      m.paragraphs.emplace_back(assertion());
    } else if (t.is_keyword("check")) {
      auto c = check();
      if (m.find_check(c.assertion)) {
        throw Error(ErrorKind::Syntax, "duplicate check for assertion '" + c.assertion + "'", c.pos);
      }
      m.paragraphs.emplace_back(std::move(c));
    } else {
      fail("one of 'sig', 'abstract', 'fact', 'pred', 'fun', 'assert', 'check'");
    }
  }

  void sig(SourceModel& m) {
    const Pos start = peek().pos;
    bool is_abstract = false;
    if (at_kw("abstract")) {
      take();
      is_abstract = true;
    }
    expect_kw("sig");
    std::vector<const Token*> names{&ident()};
    while (at(TokenKind::Comma)) {
      take();
      names.push_back(&ident());
    }
    SigKind kind = SigKind::TopLevel;
    std::string parent;
    if (at_kw("extends") || at_kw("in")) {
      kind = take().text == "extends" ? SigKind::Extends : SigKind::In;
      parent = ident().text;
      if (kind == SigKind::In && at(TokenKind::Plus)) {
        throw Error(ErrorKind::OutOfScope, "union parents in 'in' signatures", peek().pos);
      }
    }
    expect(TokenKind::LBrace, "'{'");
    std::vector<FieldDecl> fields;
    while (!at(TokenKind::RBrace)) {
      field_group(fields);
      if (!at(TokenKind::Comma)) break;
      take();
    }
    expect(TokenKind::RBrace, "'}' or ','");
    if (at(TokenKind::LBrace)) {
      throw Error(ErrorKind::OutOfScope, "signature facts", peek().pos);
    }
    for (std::size_t k = 0; k < names.size(); ++k) {
      SigDecl d;
      d.name = names[k]->text;
      d.kind = kind;
      d.parent = parent;
      d.is_abstract = is_abstract;
      // Fields declared in a multi-name sig belong to each sig.
      d.fields = fields;
      d.pos = k == 0 ? start : names[k]->pos;
      m.sigs.push_back(std::move(d));
    }
  }

  void field_group(std::vector<FieldDecl>& out) {
    if (at_kw("disj")) fail("field name");
    std::vector<const Token*> names{&ident()};
    while (at(TokenKind::Comma)) {
      take();
      names.push_back(&ident());
    }
    expect(TokenKind::Colon, "':'");
    std::vector<ExprPtr> columns;
    std::optional<Multiplicity> mult;
    std::size_t mult_column = 0;
    Pos mult_pos;
    for (;;) {
      if (is_multiplicity_kw(peek())) {
        if (mult) {
          throw Error(ErrorKind::OutOfScope, "multiplicity on a column other than the last",
                      mult_pos);
        }
        mult_pos = peek().pos;
        mult = to_multiplicity(take());
        mult_column = columns.size();
      }
      columns.push_back(join());
      if (!at(TokenKind::Arrow)) break;
      take();
    }
    if (mult && mult_column + 1 != columns.size()) {
      throw Error(ErrorKind::OutOfScope, "multiplicity on a column other than the last", mult_pos);
    }
    for (const Token* n : names) {
      FieldDecl f;
      f.name = n->text;
      f.columns = columns;
      f.multiplicity = mult.value_or(Multiplicity::One);
      f.pos = n->pos;
      out.push_back(std::move(f));
    }
  }

  std::vector<FormulaPtr> block() {
    expect(TokenKind::LBrace, "'{'");
    std::vector<FormulaPtr> body;
    while (!at(TokenKind::RBrace)) {
      if (at(TokenKind::End)) fail("'}'");
      body.push_back(formula());
    }
    take();
    return body;
  }

  FactDecl fact() {
    FactDecl d;
    d.pos = take().pos;
    if (at(TokenKind::Identifier)) d.name = take().text;
    d.body = block();
    return d;
  }

  std::vector<Param> params() {
    std::vector<Param> out;
    TokenKind close;
    if (at(TokenKind::LParen)) {
      close = TokenKind::RParen;
    } else if (at(TokenKind::LBracket)) {
      close = TokenKind::RBracket;
    } else {
      return out;
    }
    take();
    while (!at(close)) {
      if (at_kw("disj")) fail("parameter name");
      std::vector<const Token*> names{&ident()};
      while (at(TokenKind::Comma)) {
        take();
        names.push_back(&ident());
      }
      expect(TokenKind::Colon, "':' or ','");
      if (is_multiplicity_kw(peek())) {
        throw Error(ErrorKind::OutOfScope, "parameter multiplicities", peek().pos);
      }
      auto type = expr();
      for (const Token* n : names) out.push_back(Param{n->text, type, n->pos});
      if (!at(TokenKind::Comma)) break;
      take();
    }
    expect(close, close == TokenKind::RParen ? "')'" : "']'");
    return out;
  }

  PredDecl pred() {
    PredDecl d;
    d.pos = take().pos;
    d.name = ident().text;
    if (at(TokenKind::Dot)) {
      throw Error(ErrorKind::OutOfScope, "receiver-style predicate declarations", peek().pos);
    }
    d.params = params();
    d.body = block();
    return d;
  }

  FunDecl fun() {
    FunDecl d;
    d.pos = take().pos;
    d.name = ident().text;
    if (at(TokenKind::Dot)) {
      throw Error(ErrorKind::OutOfScope, "receiver-style function declarations", peek().pos);
    }
    d.params = params();
    expect(TokenKind::Colon, "':'");
    if (is_multiplicity_kw(peek())) d.result_multiplicity = to_multiplicity(take());
    d.result_type = expr();
    expect(TokenKind::LBrace, "'{'");
    d.body = expr();
    expect(TokenKind::RBrace, "'}'");
    return d;
  }

  AssertDecl assertion() {
    AssertDecl d;
    d.pos = take().pos;
    d.name = ident().text;
    d.body = block();
    return d;
  }

  CheckCmd check() {
    CheckCmd c;
    c.pos = take().pos;
    if (at(TokenKind::LBrace)) {
      throw Error(ErrorKind::OutOfScope, "anonymous check blocks", peek().pos);
    }
    c.assertion = ident().text;
    if (at_kw("for")) {
      take();
      const Token& n = expect(TokenKind::Number, "scope number");
      c.scope = std::stoi(n.text);
      if (at_kw("but")) fail("end of check command");
      if (at(TokenKind::Identifier)) {
        throw Error(ErrorKind::OutOfScope, "per-type scopes", peek().pos);
      }
    }
    return c;
  }

  // ---- formulas -----------------------------------------------------------

  FormulaPtr formula() { return implies(); }

  FormulaPtr implies() {
    auto lhs = iff();
    if (at_kw("implies") || at(TokenKind::FatArrow)) {
      const Pos p = take().pos;
      auto rhs = implies();
      if (at_kw("else")) fail("end of formula");
      return make_binary(FormulaKind::Implies, lhs, rhs, p);
    }
    return lhs;
  }

  FormulaPtr iff() {
    auto lhs = disjunction();
    while (at_kw("iff") || at(TokenKind::Iff)) {
      const Pos p = take().pos;
      lhs = make_binary(FormulaKind::Iff, lhs, disjunction(), p);
    }
    return lhs;
  }

  FormulaPtr disjunction() {
    auto lhs = conjunction();
    while (at_kw("or") || at(TokenKind::OrOr)) {
      const Pos p = take().pos;
      lhs = make_binary(FormulaKind::Or, lhs, conjunction(), p);
    }
    return lhs;
  }

  FormulaPtr conjunction() {
    auto lhs = negation();
    while (at_kw("and") || at(TokenKind::AndAnd)) {
      const Pos p = take().pos;
      lhs = make_binary(FormulaKind::And, lhs, negation(), p);
    }
    return lhs;
  }

  FormulaPtr negation() {
    if (at_kw("not") || at(TokenKind::Bang)) {
      const Pos p = take().pos;
      return make_not(negation(), p);
    }
    return atom();
  }

  bool at_quantified_decl() const {
    return is_quantifier_kw(peek()) && peek(1).kind == TokenKind::Identifier &&
           (peek(2).kind == TokenKind::Colon || peek(2).kind == TokenKind::Comma);
  }

  FormulaPtr atom() {
    const Token& t = peek();
    if (t.is_keyword("true") || t.is_keyword("false")) {
      take();
      return make_bool(t.text == "true", t.pos);
    }
    if (is_quantifier_kw(t) && peek(1).is_keyword("disj")) {
      throw Error(ErrorKind::OutOfScope, "disjoint declarations (disj)", peek(1).pos);
    }
    if (at_quantified_decl()) return quantified();
    if (is_quantifier_kw(t) && !t.is_keyword("all")) {
      take();
      return make_cardinality(to_quantifier(t), expr(), t.pos);
    }
    if (const char* what = out_of_scope_keyword(t)) {
      throw Error(ErrorKind::OutOfScope, what, t.pos);
    }
    if (t.kind == TokenKind::LBrace) {
      throw Error(ErrorKind::OutOfScope, "set comprehensions and formula blocks", t.pos);
    }

    const std::size_t save = i_;
    try {
      return comparison();
    } catch (const Error& first) {
      if (first.kind() == ErrorKind::OutOfScope || !at_paren_start(save)) throw;
      i_ = save;
      try {
        take();
        auto f = formula();
        expect(TokenKind::RParen, "')'");
        return f;
      } catch (const Error& second) {
        if (second.kind() == ErrorKind::OutOfScope) throw;
        throw later(first.pos(), second.pos()) ? first : second;
      }
    }
  }

  bool at_paren_start(std::size_t index) const {
    return toks_[index].kind == TokenKind::LParen;
  }

  FormulaPtr comparison() {
    auto lhs = expr();
    const Token& t = peek();
    std::optional<CompareOp> op;
    bool negated = false;
    if (t.kind == TokenKind::Equal) {
      op = CompareOp::Equal;
    } else if (t.kind == TokenKind::NotEqual) {
      op = CompareOp::NotEqual;
    } else if (t.is_keyword("in")) {
      op = CompareOp::In;
    } else if (t.kind == TokenKind::Colon) {
      op = CompareOp::Colon;
    } else if ((t.is_keyword("not") || t.kind == TokenKind::Bang) && peek(1).is_keyword("in")) {
      op = CompareOp::In;
      negated = true;
      take();
    }
    if (!op) {
      if (lhs->kind == ExprKind::Call) return make_pred_call(lhs->name, lhs->args, lhs->pos);
      fail("comparison operator ('=', '!=', 'in', ':')");
    }
    const Pos op_pos = take().pos;
    auto rhs = expr();
    auto f = make_compare(*op, lhs, rhs, op_pos);
    return negated ? make_not(f, op_pos) : f;
  }

  FormulaPtr quantified() {
    const Token& q = take();
    const Quantifier quant = to_quantifier(q);
    struct Binder {
      std::string name;
      ExprPtr bound;
      Pos pos;
    };
    std::vector<Binder> binders;
    for (;;) {
      if (at_kw("disj")) fail("variable name");
      std::vector<const Token*> names{&ident()};
      while (at(TokenKind::Comma)) {
        take();
        names.push_back(&ident());
      }
      expect(TokenKind::Colon, "':' or ','");
      if (is_multiplicity_kw(peek())) {
        throw Error(ErrorKind::OutOfScope, "higher-order quantification", peek().pos);
      }
      auto bound = expr();
      for (const Token* n : names) binders.push_back({n->text, bound, n->pos});
      if (!at(TokenKind::Comma)) break;
      take();
    }
    FormulaPtr body;
    if (at(TokenKind::Bar)) {
      take();
      body = formula();
    } else if (at(TokenKind::LBrace)) {
      auto parts = block();
      body = conjoin(parts, peek().pos);
    } else {
      fail("'|' or '{'");
    }
    for (auto it = binders.rbegin(); it != binders.rend(); ++it) {
      const Pos p = it + 1 == binders.rend() ? q.pos : it->pos;
      body = make_quantified(quant, it->name, it->bound, body, p);
    }
    return body;
  }

  static FormulaPtr conjoin(const std::vector<FormulaPtr>& parts, Pos pos) {
    if (parts.empty()) return make_bool(true, pos);
    FormulaPtr acc = parts[0];
    for (std::size_t k = 1; k < parts.size(); ++k) {
      acc = make_binary(FormulaKind::And, acc, parts[k], parts[k]->pos);
    }
    return acc;
  }

  // ---- expressions ----------------------------------------------------------

  ExprPtr expr() {
    auto lhs = intersection();
    for (;;) {
      if (at(TokenKind::Plus) || at(TokenKind::Minus)) {
        const Token& t = take();
        const auto kind = t.kind == TokenKind::Plus ? ExprKind::Union : ExprKind::Difference;
        lhs = make_expr(kind, {lhs, intersection()}, t.pos);
      } else if (at(TokenKind::PlusPlus)) {
        fail("operator");
      } else {
        return lhs;
      }
    }
  }

  ExprPtr intersection() {
    auto lhs = product();
    while (at(TokenKind::Amp)) {
      const Pos p = take().pos;
      lhs = make_expr(ExprKind::Intersection, {lhs, product()}, p);
    }
    return lhs;
  }

  ExprPtr product() {
    auto lhs = join();
    for (;;) {
      if (at(TokenKind::Arrow)) {
        const Pos p = take().pos;
        if (is_multiplicity_kw(peek())) {
          throw Error(ErrorKind::OutOfScope, "arrow multiplicities in expressions", peek().pos);
        }
        lhs = make_expr(ExprKind::Product, {lhs, join()}, p);
      } else if (at(TokenKind::LeftRestrict) || at(TokenKind::RightRestrict)) {
        fail("operator");
      } else {
        return lhs;
      }
    }
  }

  ExprPtr join() {
    auto lhs = unary();
    while (at(TokenKind::Dot)) {
      const Pos p = take().pos;
      lhs = make_expr(ExprKind::Join, {lhs, unary()}, p);
    }
    return lhs;
  }

  ExprPtr unary() {
    if (at(TokenKind::Caret) || at(TokenKind::Star)) {
      const Token& t = take();
      const auto kind = t.kind == TokenKind::Caret ? ExprKind::Closure : ExprKind::ReflexiveClosure;
      return make_expr(kind, {unary()}, t.pos);
    }
    return primary();
  }

  ExprPtr primary() {
    if (at(TokenKind::LParen)) {
      take();
      auto e = expr();
      expect(TokenKind::RParen, "')'");
      if (at(TokenKind::LBracket)) {
        throw Error(ErrorKind::OutOfScope, "box join on a compound expression", peek().pos);
      }
      return e;
    }
    if (at(TokenKind::LBrace)) {
      throw Error(ErrorKind::OutOfScope, "set comprehensions", peek().pos);
    }
    if (!at(TokenKind::Identifier)) fail("expression");
    const Token& name = take();
    if (!at(TokenKind::LBracket)) return make_name(name.text, name.pos);
    take();
    std::vector<ExprPtr> args;
    if (!at(TokenKind::RBracket)) {
      args.push_back(expr());
      while (at(TokenKind::Comma)) {
        take();
        args.push_back(expr());
      }
    }
    expect(TokenKind::RBracket, "']' or ','");
    if (at(TokenKind::LBracket)) {
      throw Error(ErrorKind::OutOfScope, "chained box joins", peek().pos);
    }
    return make_call(name.text, std::move(args), name.pos);
  }
};

}  // namespace

SourceModel parse_model(const std::vector<Token>& tokens, std::string source_name) {
  return Parser(tokens).model(std::move(source_name));
}

SourceModel parse_source(std::string_view text, std::string source_name) {
  return parse_model(tokenize(text), std::move(source_name));
}

SourceModel parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Usage, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_source(ss.str(), path);
}

FormulaPtr parse_formula_text(std::string_view text) {
  const auto toks = tokenize(text);
  return Parser(toks).single_formula();
}

ExprPtr parse_expr_text(std::string_view text) {
  const auto toks = tokenize(text);
  return Parser(toks).single_expr();
}

}  // namespace alloysmt
