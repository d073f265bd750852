#include <gtest/gtest.h>

#include <random>

#include "alloysmt/diagnostics.hpp"
#include "alloysmt/smt.hpp"

using namespace alloysmt;
using namespace alloysmt::smt;

TEST(Symbols, QuotingOnlyWhenNeeded) {
  EXPECT_EQ(quote_symbol("addr"), "addr");
  EXPECT_EQ(quote_symbol("Name$1"), "Name$1");
  EXPECT_EQ(quote_symbol("b'"), "|b'|");
  EXPECT_EQ(quote_symbol("has space"), "|has space|");
  EXPECT_EQ(quote_symbol("9lives"), "|9lives|");
  EXPECT_TRUE(is_simple_symbol("x!0"));
  EXPECT_FALSE(is_simple_symbol(""));
}

TEST(Printer, AppliesQuotesAndParsesBack) {
  const Term t = app("assert", {mk_eq(app("addr", {sym("b'"), sym("n")}), sym("noAddr"))});
  EXPECT_EQ(print(t), "(assert (= (addr |b'| n) noAddr))");
  const auto back = parse(print(t));
  ASSERT_EQ(back.size(), 1u);
  EXPECT_TRUE(same(back[0], t));
}

TEST(Printer, PrettyKeepsTermsIntact) {
  std::vector<Term> parts;
  for (int i = 0; i < 30; ++i) parts.push_back(app("p", {sym("x$" + std::to_string(i))}));
  const Term t = mk_forall({{"x", "Name"}}, mk_or(parts));
  const auto text = pretty(t, 60);
  EXPECT_NE(text.find('\n'), std::string::npos);
  EXPECT_EQ(text.rfind("(forall ((x Name))", 0), 0u) << text;
  const auto back = parse(text);
  ASSERT_EQ(back.size(), 1u);
  EXPECT_TRUE(same(back[0], t));
}

TEST(Printer, RandomTermsRoundTrip) {
  std::mt19937 rng(5);
  const std::vector<std::string> atoms = {"a", "b'", "x!1", "Name$2", "|odd|", "true", "0"};
  std::function<Term(int)> gen = [&](int depth) -> Term {
    if (depth == 0 || rng() % 3 == 0) {
      const auto& a = atoms[rng() % atoms.size()];
      return sym(a == "|odd|" ? "odd sym" : a);
    }
    std::vector<Term> kids{sym("f")};
    const int n = 1 + static_cast<int>(rng() % 4);
    for (int i = 0; i < n; ++i) kids.push_back(gen(depth - 1));
    return list(kids);
  };
  for (int i = 0; i < 300; ++i) {
    const Term t = gen(5);
    const auto back = parse(pretty(t, 20 + static_cast<int>(rng() % 60)));
    ASSERT_EQ(back.size(), 1u);
    EXPECT_TRUE(same(back[0], t)) << print(t);
  }
}

TEST(Parser, SkipsCommentsAndRejectsGarbage) {
  const auto ts = parse(";; hello\n(a b) ; trailing\n|c d|");
  ASSERT_EQ(ts.size(), 2u);
  EXPECT_EQ(ts[1]->atom, "c d");
  EXPECT_THROW(parse("(a b"), Error);
  EXPECT_THROW(parse(")"), Error);
}

TEST(Builders, FoldConstants) {
  EXPECT_TRUE(same(mk_and({mk_true(), sym("p")}), sym("p")));
  EXPECT_TRUE(same(mk_and({mk_false(), sym("p")}), mk_false()));
  EXPECT_TRUE(same(mk_or({mk_true(), sym("p")}), mk_true()));
  EXPECT_TRUE(same(mk_and({}), mk_true()));
  EXPECT_TRUE(same(mk_or({}), mk_false()));
  EXPECT_TRUE(same(mk_not(mk_not(sym("p"))), sym("p")));
  EXPECT_TRUE(same(mk_implies(mk_true(), sym("p")), sym("p")));
  EXPECT_TRUE(same(mk_implies(sym("p"), mk_true()), mk_true()));
  EXPECT_TRUE(same(mk_eq(sym("x"), sym("x")), mk_true()));
  EXPECT_TRUE(same(mk_forall({{"x", "S"}}, mk_true()), mk_true()));
  EXPECT_EQ(print(mk_and({sym("p"), mk_and({sym("q"), sym("r")})})), "(and p q r)");
}

TEST(Builders, PreserveMeaning) {
  // Compare folded and unfolded forms under every assignment of three Booleans.
  Interpretation in;
  const std::vector<std::string> vars = {"p", "q", "r"};
  for (int bits = 0; bits < 8; ++bits) {
    for (int i = 0; i < 3; ++i) in.set_constant(vars[static_cast<std::size_t>(i)], "Bool", (bits >> i) & 1);
    const Term p = sym("p"), q = sym("q"), r = sym("r");
    EXPECT_EQ(in.holds(mk_ite(p, q, r)), in.holds(list({sym("ite"), p, q, r})));
    EXPECT_EQ(in.holds(mk_iff(p, q)), in.holds(p) == in.holds(q));
    EXPECT_EQ(in.holds(mk_implies(p, mk_or({q, r}))), !in.holds(p) || in.holds(q) || in.holds(r));
    EXPECT_EQ(in.holds(mk_ite(mk_true(), q, r)), in.holds(q));
    EXPECT_EQ(in.holds(mk_ite(p, mk_true(), mk_false())), in.holds(p));
  }
}

TEST(Script, PrintsCommentsAboveCommands) {
  Script s;
  s.comment("header");
  s.set_logic("UF");
  s.declare_sort("A");
  s.declare_fun("f", {"A", "A"}, "Bool");
  s.assert_(mk_true(), "src:3");
  const auto text = s.str();
  EXPECT_NE(text.find(";; header\n(set-logic UF)\n(declare-sort A 0)\n"), std::string::npos) << text;
  EXPECT_NE(text.find(";; src:3\n(assert true)"), std::string::npos) << text;
}

TEST(Eval, QuantifiersAndDefinitions) {
  Interpretation in;
  in.add_sort("A", 3);
  in.set_table("lt", {"A", "A"}, "Bool", [](const std::vector<int>& a) { return a[0] < a[1] ? 1 : 0; });
  const auto ts = parse(
      "(define-fun le ((x A) (y A)) Bool (or (lt x y) (= x y)))"
      "(forall ((x A)) (exists ((y A)) (le x y)))"
      "(forall ((x A)) (exists ((y A)) (lt x y)))"
      "(let ((z A!val!0)) (forall ((x A)) (le z x)))"
      "(! (lt A!val!0 A!val!2) :named n)");
  in.define("le", {{"x", "A"}, {"y", "A"}}, "Bool", ts[0]->kids[4]);
  EXPECT_TRUE(in.holds(ts[1]));
  EXPECT_FALSE(in.holds(ts[2]));
  EXPECT_TRUE(in.holds(ts[3]));
  EXPECT_TRUE(in.holds(ts[4]));
  EXPECT_THROW(in.eval(sym("nope")), Error);
}

TEST(Eval, ReadsSolverModels) {
  // Shape of a z3 `get-model` response: universe declarations, a cardinality constraint,
  // and definitions with `let`.
  const auto model = parse(R"((
  (declare-fun T!val!1 () T)
  (declare-fun T!val!0 () T)
  (forall ((x T)) (or (= x T!val!1) (= x T!val!0)))
  (define-fun c () T T!val!1)
  (define-fun |c'| () T T!val!0)
  (define-fun p ((x!0 T)) Bool
    (let ((a!1 (not (= x!0 T!val!0)))) a!1))
  (define-fun f ((x!0 T) (x!1 T)) T
    (ite (and (= x!0 T!val!1) (= x!1 T!val!1)) T!val!0 T!val!1))
))");
  const auto in = Interpretation::from_model(model);
  EXPECT_EQ(in.sort_size("T"), 2);
  EXPECT_TRUE(in.holds(parse("(p c)")[0]));
  EXPECT_FALSE(in.holds(parse("(p |c'|)")[0]));
  EXPECT_TRUE(in.holds(parse("(= (f c c) |c'|)")[0]));
  EXPECT_TRUE(in.holds(parse("(forall ((x T)) (or (p x) (= x |c'|)))")[0]));
  EXPECT_EQ(in.result_sort("f"), "T");
}
