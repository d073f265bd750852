#include <gtest/gtest.h>

#include <random>

#include "alloysmt/diagnostics.hpp"
#include "alloysmt/parser.hpp"
#include "random_ast.hpp"

using namespace alloysmt;

namespace {

std::vector<std::pair<TokenKind, std::string>> kinds(std::string_view src) {
  std::vector<std::pair<TokenKind, std::string>> out;
  for (const auto& t : tokenize(src)) out.emplace_back(t.kind, t.text);
  return out;
}

ErrorKind error_kind_of(std::string_view src) {
  try {
    parse_source(src);
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected an error for: " << src;
  return ErrorKind::Usage;
}

Error error_of(std::string_view src) {
  try {
    parse_source(src);
  } catch (const Error& e) {
    return e;
  }
  throw std::runtime_error("no error");
}

template <class T>
std::size_t count_paragraphs(const SourceModel& m) {
  std::size_t n = 0;
  for (const auto& p : m.paragraphs) n += std::holds_alternative<T>(p);
  return n;
}

}  // namespace

TEST(Tokenize, SigKeywordAndBraces) {
  const auto toks = kinds("sig Book {}");
  ASSERT_EQ(toks.size(), 5u);
  EXPECT_EQ(toks[0], std::make_pair(TokenKind::Keyword, std::string("sig")));
  EXPECT_EQ(toks[1], std::make_pair(TokenKind::Identifier, std::string("Book")));
  EXPECT_EQ(toks[2].first, TokenKind::LBrace);
  EXPECT_EQ(toks[3].first, TokenKind::RBrace);
  EXPECT_EQ(toks[4].first, TokenKind::End);
}

TEST(Tokenize, ClosureLookupExpression) {
  const auto toks = kinds("n.^(b.addr)");
  const std::vector<TokenKind> expected = {
      TokenKind::Identifier, TokenKind::Dot,        TokenKind::Caret, TokenKind::LParen,
      TokenKind::Identifier, TokenKind::Dot,        TokenKind::Identifier,
      TokenKind::RParen,     TokenKind::End};
  ASSERT_EQ(toks.size(), expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) EXPECT_EQ(toks[i].first, expected[i]) << i;
  EXPECT_EQ(toks[0].second, "n");
  EXPECT_EQ(toks[4].second, "b");
  EXPECT_EQ(toks[6].second, "addr");
}

TEST(Tokenize, IllegalCharacterReportsFirstColumn) {
  try {
    tokenize("@#$");
    FAIL() << "expected lexical error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Lexical);
    EXPECT_EQ(e.pos().line, 1);
    EXPECT_EQ(e.pos().column, 1);
  }
}

TEST(Tokenize, CommentsDroppedAndPositionsTracked) {
  const auto toks = tokenize("-- one\n// two\n/* three\n */ sig  A");
  ASSERT_EQ(toks.size(), 3u);
  EXPECT_EQ(toks[0].pos.line, 4);
  EXPECT_EQ(toks[0].pos.column, 5);
  EXPECT_EQ(toks[1].pos.column, 10);
}

TEST(Tokenize, PrimedIdentifiers) {
  const auto toks = kinds("b' b'' n'");
  EXPECT_EQ(toks[0].second, "b'");
  EXPECT_EQ(toks[1].second, "b''");
  EXPECT_EQ(toks[2].second, "n'");
}

TEST(Parse, MinimalSig) {
  const auto m = parse_source("sig A {}");
  ASSERT_EQ(m.sigs.size(), 1u);
  EXPECT_EQ(m.sigs[0].name, "A");
  EXPECT_EQ(m.sigs[0].kind, SigKind::TopLevel);
  EXPECT_TRUE(m.sigs[0].parent.empty());
  EXPECT_FALSE(m.sigs[0].is_abstract);
  EXPECT_TRUE(m.sigs[0].fields.empty());
  EXPECT_EQ(pretty_print(m), "sig A {}\n");
}

TEST(Parse, BasicCorpusShape) {
  const auto m = parse_file(std::string(ALLOYSMT_CORPUS_DIR) + "/basic.als");
  EXPECT_EQ(m.sigs.size(), 3u);
  EXPECT_EQ(count_paragraphs<PredDecl>(m), 2u);
  EXPECT_EQ(count_paragraphs<FunDecl>(m), 1u);
  // The figure has one assertion; the corpus carries all three used in the evaluation.
  EXPECT_EQ(count_paragraphs<AssertDecl>(m), 3u);
  EXPECT_EQ(count_paragraphs<CheckCmd>(m), 3u);
  const auto& book = m.sigs[2];
  ASSERT_EQ(book.fields.size(), 1u);
  EXPECT_EQ(book.fields[0].columns.size(), 2u);
  EXPECT_EQ(book.fields[0].multiplicity, Multiplicity::Lone);
}

TEST(Parse, FigureOneSingleAssertion) {
  const char* src = R"(
sig Name, Addr {}
sig Book { addr: Name -> lone Addr }
pred add (b, b': Book, n: Name, a: Addr) { b'.addr = b.addr + n->a }
pred del (b, b': Book, n: Name) { b'.addr = b.addr - n->Addr }
fun lookup (b: Book, n: Name): set Addr { n.(b.addr) }
assert delUndoesAdd {
  all b, b', b'': Book, n: Name, a: Addr |
    no n.(b.addr) and add[b, b', n, a] and del[b', b'', n] implies b.addr = b''.addr
}
check delUndoesAdd for 3
)";
  const auto m = parse_source(src);
  EXPECT_EQ(m.sigs.size(), 3u);
  EXPECT_EQ(count_paragraphs<PredDecl>(m), 2u);
  EXPECT_EQ(count_paragraphs<FunDecl>(m), 1u);
  EXPECT_EQ(count_paragraphs<AssertDecl>(m), 1u);
  EXPECT_EQ(count_paragraphs<CheckCmd>(m), 1u);
  EXPECT_EQ(m.find_check("delUndoesAdd")->scope, 3);
}

TEST(Parse, TernaryFieldWithSomeRange) {
  const auto m = parse_source("sig Name, Target {} sig Book { names: set Name, addr: names -> some Target }");
  const auto& f = m.sigs[2].fields[1];
  EXPECT_EQ(f.name, "addr");
  EXPECT_EQ(f.columns.size() + 1, 3u);
  EXPECT_EQ(f.multiplicity, Multiplicity::Some);
  EXPECT_EQ(f.columns[0]->name, "names");
  EXPECT_EQ(m.sigs[2].fields[0].multiplicity, Multiplicity::Set);
}

TEST(Parse, MultiVariableQuantifierDesugarsToNestedBinders) {
  const auto f = parse_formula_text("all b, b': Book, n: Name | b = b'");
  const Formula* cur = f.get();
  const char* names[] = {"b", "b'", "n"};
  for (const char* name : names) {
    ASSERT_EQ(cur->kind, FormulaKind::Quantified);
    EXPECT_EQ(cur->name, name);
    EXPECT_GT(cur->pos.line, 0);
    cur = cur->kids[0].get();
  }
  EXPECT_EQ(cur->kind, FormulaKind::Compare);
}

TEST(Parse, OperatorPrecedence) {
  // `.` binds tighter than `->`, which binds tighter than `&`, then `+`.
  const auto e = parse_expr_text("a + b & c -> d.e");
  ASSERT_EQ(e->kind, ExprKind::Union);
  const auto& rhs = *e->args[1];
  ASSERT_EQ(rhs.kind, ExprKind::Intersection);
  ASSERT_EQ(rhs.args[1]->kind, ExprKind::Product);
  EXPECT_EQ(rhs.args[1]->args[1]->kind, ExprKind::Join);

  const auto c = parse_expr_text("^a.b");
  ASSERT_EQ(c->kind, ExprKind::Join);
  EXPECT_EQ(c->args[0]->kind, ExprKind::Closure);

  // not > and > or > implies
  const auto f = parse_formula_text("not a = b and c = d or e = f implies g = h");
  ASSERT_EQ(f->kind, FormulaKind::Implies);
  ASSERT_EQ(f->kids[0]->kind, FormulaKind::Or);
  ASSERT_EQ(f->kids[0]->kids[0]->kind, FormulaKind::And);
  EXPECT_EQ(f->kids[0]->kids[0]->kids[0]->kind, FormulaKind::Not);
}

TEST(Parse, ImpliesIsRightAssociative) {
  const auto f = parse_formula_text("a = a implies b = b implies c = c");
  ASSERT_EQ(f->kind, FormulaKind::Implies);
  EXPECT_EQ(f->kids[1]->kind, FormulaKind::Implies);
}

TEST(Parse, ParenthesizedFormulaAndNotIn) {
  const auto f = parse_formula_text("not (n in n.^(b.addr))");
  ASSERT_EQ(f->kind, FormulaKind::Not);
  ASSERT_EQ(f->kids[0]->kind, FormulaKind::Compare);
  EXPECT_EQ(f->kids[0]->op, CompareOp::In);
  const auto g = parse_formula_text("x not in y");
  ASSERT_EQ(g->kind, FormulaKind::Not);
  EXPECT_EQ(g->kids[0]->op, CompareOp::In);
  const auto h = parse_formula_text("(no x) and (x = y)");
  EXPECT_EQ(h->kind, FormulaKind::And);
}

TEST(Parse, CardinalityVersusQuantifier) {
  const auto a = parse_formula_text("lone a.(b.addr)");
  EXPECT_EQ(a->kind, FormulaKind::Cardinality);
  EXPECT_EQ(a->quant, Quantifier::Lone);
  const auto b = parse_formula_text("lone x: A | x = x");
  EXPECT_EQ(b->kind, FormulaKind::Quantified);
  EXPECT_EQ(b->quant, Quantifier::Lone);
}

TEST(Parse, PredicateCallAsFormula) {
  const auto f = parse_formula_text("add[b, b', n, a]");
  ASSERT_EQ(f->kind, FormulaKind::PredCall);
  EXPECT_EQ(f->name, "add");
  EXPECT_EQ(f->args.size(), 4u);
}

TEST(Parse, QuantifierBlockBody) {
  const auto f = parse_formula_text("all x: A { x = x  x in A }");
  ASSERT_EQ(f->kind, FormulaKind::Quantified);
  EXPECT_EQ(f->kids[0]->kind, FormulaKind::And);
}

TEST(Parse, SyntaxErrorNamesExpectedTokens) {
  const auto e = error_of("sig A {\n  f: \n}");
  EXPECT_EQ(e.kind(), ErrorKind::Syntax);
  EXPECT_EQ(e.pos().line, 3);
  EXPECT_NE(e.message().find("expected"), std::string::npos);
  const auto e2 = error_of("pred p [x: A] { x = }");
  EXPECT_EQ(e2.kind(), ErrorKind::Syntax);
  EXPECT_EQ(e2.pos().column, 21);
}

TEST(Parse, DuplicateCheckRejected) {
  EXPECT_EQ(error_kind_of("assert a { true } check a check a"), ErrorKind::Syntax);
}

TEST(Parse, OutOfScopeConstructsAreNamed) {
  const char* cases[] = {
      "open ordering",
      "sig A {} fact { #A = 2 }",
      "sig A { f: A } fact { all x: A | x.~f = x }",
      "sig A {} fact { let y = A | y = y }",
      "sig A {} fact { some x: A | x in univ }",
      "one sig A {}",
      "sig A {} run {}",
      "sig A { f: A } fact { A.f = { x: A | x = x } }",
      "sig A { f: lone A -> A }",
      "sig A {} check x for 3 but 2 A",
      "sig A { f: A } fact { f ++ f = f }",
      "sig A {} fact { all disj x, y: A | x = y }",
  };
  for (const char* src : cases) {
    EXPECT_EQ(error_kind_of(src), ErrorKind::OutOfScope) << src;
  }
}

TEST(Parse, ErrorPositionsLieWithinInput) {
  const char* cases[] = {"sig", "sig A { f:", "fact { all x: | }", "pred p [", "fun f: A {",
                         "assert a { a = }", "sig A {} @", "check"};
  for (const char* src : cases) {
    const std::string text = src;
    const auto e = error_of(text);
    int lines = 1;
    for (char c : text) lines += c == '\n';
    EXPECT_GE(e.pos().line, 1) << src;
    EXPECT_LE(e.pos().line, lines) << src;
    EXPECT_GE(e.pos().column, 1) << src;
    EXPECT_LE(e.pos().column, static_cast<int>(text.size()) + 1) << src;
  }
}

TEST(RoundTrip, Corpus) {
  for (const char* file : {"basic.als", "hierarchical.als", "acyclic.als"}) {
    const auto m = parse_file(std::string(ALLOYSMT_CORPUS_DIR) + "/" + file);
    const auto text = pretty_print(m);
    const auto again = parse_source(text);
    EXPECT_TRUE(structurally_equal(m, again)) << file << "\n" << text;
    EXPECT_EQ(pretty_print(again), text) << file;
  }
}

TEST(RoundTrip, NestedQuantifierParenthesization) {
  auto inner = make_quantified(Quantifier::Some, "y", make_name("B"),
                               make_compare(CompareOp::Equal, make_name("x"), make_name("y")));
  auto f = make_binary(FormulaKind::And, inner, make_not(inner));
  auto outer = make_quantified(Quantifier::All, "x", make_name("A"), f);
  const auto text = pretty_print(*outer);
  EXPECT_EQ(text, "all x: A | (some y: B | x = y) and not (some y: B | x = y)");
  EXPECT_TRUE(structurally_equal(*parse_formula_text(text), *outer));
}

TEST(RoundTrip, RandomAsts) {
  std::mt19937 rng(20241015);
  int checked = 0;
  for (int i = 0; i < 600; ++i) {
    const auto m = testing_support::random_model(rng);
    const auto text = pretty_print(m);
    SourceModel again;
    try {
      again = parse_source(text);
    } catch (const Error& e) {
      ADD_FAILURE() << e.what() << "\n" << text;
      continue;
    }
    ASSERT_TRUE(structurally_equal(m, again)) << text;
    ++checked;
  }
  for (int i = 0; i < 600; ++i) {
    const auto f = testing_support::random_formula(rng, 4);
    const auto text = pretty_print(*f);
    ASSERT_TRUE(structurally_equal(*f, *parse_formula_text(text))) << text;
    ++checked;
  }
  EXPECT_GE(checked, 1200);
}
