#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

#include "alloysmt/diagnostics.hpp"
#include "alloysmt/parser.hpp"
#include "alloysmt/translate.hpp"
#include "corpus.hpp"
#include "properties.hpp"
#include "random_instance.hpp"

using namespace alloysmt;
using testing_support::load_problem;
using testing_support::problem_from;
using testing_support::random_skolems;

namespace {

TypeId type_of(const CheckProblem& p, const std::string& name) { return *p.hierarchy.find(name); }

std::vector<smt::Term> assertions(const Translation& t) {
  std::vector<smt::Term> out;
  for (const auto& c : t.script.commands()) {
    if (c.term && smt::is_atom(c.term->kids[0], "assert")) out.push_back(c.term->kids[1]);
  }
  return out;
}

/// Every bounded type has at most its bound of members.
bool within_plan(const CheckProblem& p, const ScopePlan& plan, const Instance& inst) {
  for (const auto& [t, b] : plan.bounds) {
    if (static_cast<int>(inst.types[static_cast<std::size_t>(t)].tuples().size()) > b.atoms) return false;
  }
  return true;
}

struct Agreement {
  int satisfied = 0;
  int violated = 0;
};

/// On well-formed instances inside the plan, the script's assertions all hold under the
/// instance's interpretation exactly when the oracle accepts facts and negated goal.
Agreement check_faithful(const CheckProblem& p, const ScopePlan& plan, int atoms, int trials, unsigned seed) {
  const auto t = translate(p, plan);
  const auto asserts = assertions(t);
  std::mt19937 rng(seed);
  Agreement a;
  for (int trial = 0; trial < trials; ++trial) {
    const auto inst = testing_support::random_instance(p.hierarchy, p.relations, atoms, rng);
    if (well_formedness_violation(p.hierarchy, p.relations, inst) || !within_plan(p, plan, inst)) continue;
    const auto sk = random_skolems(p, inst, rng);
    if (!sk) continue;
    const bool want = satisfies(p, Counterexample{inst, *sk});
    const auto interp = to_interpretation(p, t, inst, *sk);
    bool got = true;
    std::string failed;
    for (const auto& f : asserts) {
      if (!interp.holds(f)) {
        got = false;
        failed = smt::print(f);
        break;
      }
    }
    EXPECT_EQ(got, want) << "trial " << trial << (got ? "" : ", first false assertion: " + failed) << "\n"
                         << render(p, Counterexample{inst, *sk});
    if (got != want) break;
    (want ? a.satisfied : a.violated)++;
  }
  EXPECT_GE(a.satisfied + a.violated, trials / 10) << "too few instances inside the plan";
  return a;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void expect_golden(const std::string& name, const std::string& text) {
  const std::string path = std::string(ALLOYSMT_GOLDEN_DIR) + "/" + name;
  if (std::getenv("ALLOYSMT_UPDATE_GOLDEN")) {
    std::ofstream(path) << text;
    return;
  }
  const auto want = slurp(path);
  ASSERT_FALSE(want.empty()) << "missing golden file " << path << "; rerun with ALLOYSMT_UPDATE_GOLDEN=1";
  EXPECT_EQ(text, want) << name;
}

}  // namespace

// ---- script shape -----------------------------------------------------------------

TEST(Script, BasicTautologiesUseNoBoundedConstants) {
  for (const std::string a : {"delUndoesAdd", "addIdempotent", "addLocal"}) {
    const auto p = load_problem("basic", a);
    const auto t = translate(p, plan_scopes(p, {}));
    const auto text = t.text();
    EXPECT_NE(text.find("(set-logic UF)"), std::string::npos);
    EXPECT_NE(text.find("(declare-const noAddr Addr)"), std::string::npos);
    EXPECT_NE(text.find("(declare-fun addr (Book Name) Addr)"), std::string::npos);
    EXPECT_NE(text.find("(check-sat)"), std::string::npos);
    EXPECT_EQ(text.find("$1 "), std::string::npos) << "no atom constants expected:\n" << text;
    EXPECT_TRUE(t.closures.empty());
  }
}

TEST(Script, PrimedSkolemsAreQuoted) {
  const auto p = load_problem("basic", "delUndoesAdd");
  const auto text = translate(p, plan_scopes(p, {})).text();
  EXPECT_NE(text.find("(declare-const |b'| Book)"), std::string::npos);
  EXPECT_NE(text.find("(declare-const |b''| Book)"), std::string::npos);
}

TEST(Script, HierarchyBecomesMembershipPredicates) {
  const auto p = load_problem("hierarchical", "delUndoesAdd");
  const auto t = translate(p, plan_scopes(p, {}));
  const auto text = t.text();
  for (const std::string s : {"isAddr", "isName", "isAlias", "isGroup"})
    EXPECT_NE(text.find("(declare-fun " + s + " (Target) Bool)"), std::string::npos) << s;
  EXPECT_EQ(text.find("declare-sort Name"), std::string::npos);
  EXPECT_NE(text.find("(declare-fun oneTarget (Book Target) Target)"), std::string::npos);
  EXPECT_EQ(t.folded_facts.size(), 1u);
  EXPECT_EQ(t.relations[1].folded, type_of(p, "Alias"));
}

TEST(Script, EveryCommandParsesBack) {
  const auto p = load_problem("acyclic", "addLocal");
  const auto t = translate(p, plan_scopes(p, {{{"Book", 2}, {"Name", 2}}, std::nullopt}));
  const auto parsed = smt::parse(t.text());
  std::vector<smt::Term> terms;
  for (const auto& c : t.script.commands()) {
    if (c.term) terms.push_back(c.term);
  }
  ASSERT_EQ(parsed.size(), terms.size());
  for (std::size_t i = 0; i < parsed.size(); ++i) EXPECT_TRUE(smt::same(parsed[i], terms[i])) << i;
}

TEST(Script, AssertionsCarrySourceLines) {
  const auto p = load_problem("basic", "delUndoesAdd");
  const auto t = translate(p, plan_scopes(p, {}));
  for (const auto& c : t.script.commands()) {
    if (c.term && smt::is_atom(c.term->kids[0], "assert")) EXPECT_EQ(c.comment.rfind("src:", 0), 0u) << smt::print(c.term);
  }
}

TEST(Script, ClosuresUnrollToTheBound) {
  const auto p = load_problem("acyclic", "addLocal");
  for (int n = 1; n <= 4; ++n) {
    const auto t = translate(p, plan_scopes(p, {{{"Book", 1}, {"Name", n}}, std::nullopt}));
    ASSERT_FALSE(t.closures.empty());
    for (const auto& c : t.closures) {
      EXPECT_EQ(c.depth, n);
      EXPECT_EQ(static_cast<int>(c.levels.size()), n);
    }
  }
}

TEST(Script, MissingBoundIsAScopeError) {
  const auto p = load_problem("hierarchical", "addLocal");
  EXPECT_THROW(translate(p, plan_scopes(p, {})), Error);
}

TEST(Script, DeterministicAcrossRuns) {
  for (const std::string m : {"basic", "hierarchical", "acyclic"}) {
    for (const std::string a : {"delUndoesAdd", "addIdempotent", "addLocal"}) {
      const UserBounds u{{}, 2};
      const auto p1 = load_problem(m, a);
      const auto p2 = load_problem(m, a);
      EXPECT_EQ(translate(p1, plan_scopes(p1, u)).text(), translate(p2, plan_scopes(p2, u)).text()) << m << a;
    }
  }
}

TEST(Script, SymbolClashesGetSuffixes) {
  const auto p = problem_from(
      "sig x {}\nsig Bool { tc: set x, ite: Bool -> lone x }\n"
      "assert a { all k: Bool | some k.tc and lone k.ite }\ncheck a for 2\n",
      "a");
  const auto t = translate(p, plan_scopes(p, {}));
  const auto text = t.text();
  EXPECT_NE(text.find("(declare-sort Bool$1 0)"), std::string::npos) << text;
  EXPECT_NE(text.find("(declare-sort x 0)"), std::string::npos) << text;
  EXPECT_NO_THROW(smt::parse(text));
}

TEST(Golden, BasicDelUndoesAdd) {
  const auto p = load_problem("basic", "delUndoesAdd");
  expect_golden("basic_delUndoesAdd.smt2", translate(p, plan_scopes(p, {})).text());
}

TEST(Golden, HierarchicalAddLocalAtTwo) {
  const auto p = load_problem("hierarchical", "addLocal");
  expect_golden("hierarchical_addLocal_2.smt2", translate(p, plan_scopes(p, {{}, 2})).text());
}

TEST(Golden, AcyclicAddIdempotentAtTwo) {
  const auto p = load_problem("acyclic", "addIdempotent");
  expect_golden("acyclic_addIdempotent_2.smt2", translate(p, plan_scopes(p, {{}, 2})).text());
}

// ---- faithfulness -----------------------------------------------------------------

TEST(Faithful, UnboundedCorpusProblems) {
  for (const std::string m : {"basic", "hierarchical"}) {
    for (const std::string a : {"delUndoesAdd", "addIdempotent"}) {
      const auto p = load_problem(m, a);
      const auto agree = check_faithful(p, plan_scopes(p, {}), 3, 400, 5);
      EXPECT_GT(agree.violated, 50) << m << " " << a;
    }
  }
}

TEST(Faithful, BoundedCorpusProblems) {
  for (const std::string m : {"hierarchical", "acyclic"}) {
    for (const std::string a : {"delUndoesAdd", "addIdempotent", "addLocal"}) {
      for (int n : {1, 2, 3}) {
        const auto p = load_problem(m, a);
        check_faithful(p, plan_scopes(p, {{{"Book", n}, {"Name", n}}, std::nullopt}), 3, 150, 17u + static_cast<unsigned>(n));
      }
    }
  }
}

TEST(Faithful, EveryTypeBounded) {
  const std::vector<std::string> all = {"Name", "Addr", "Book", "Target", "Alias", "Group"};
  for (const std::string m : {"basic", "hierarchical", "acyclic"}) {
    for (const std::string a : {"delUndoesAdd", "addIdempotent", "addLocal"}) {
      const auto p = load_problem(m, a);
      UserBounds u;
      for (const auto& n : all) {
        if (p.hierarchy.find(n)) u.types[n] = 2;
      }
      check_faithful(p, plan_scopes(p, u), 2, 150, 23);
    }
  }
}

TEST(Faithful, SatisfyingBindingsAreFound) {
  // Force the goal to hold often so both sides of the equivalence are exercised.
  const auto p = problem_from(
      "sig N, A {}\nsig B { f: N -> lone A, g: N -> set A, h: set N }\n"
      "assert t { all b: B, n: N | lone n.(b.f) and (some n.(b.g) or no b.h) }\ncheck t for 3\n",
      "t");
  const auto agree = check_faithful(p, plan_scopes(p, {}), 3, 600, 3);
  EXPECT_GT(agree.satisfied, 20);
  EXPECT_GT(agree.violated, 20);
}

TEST(Faithful, OperatorsOnUnboundedSorts) {
  const std::string model =
      "sig N, A {}\nsig B { f: N -> lone A, g: N -> set A, k: N -> one A, s: N -> some A }\n";
  const std::vector<std::string> bodies = {
      "b.f in b.g",
      "b.g = b.s",
      "n.(b.k) in n.(b.g) & n.(b.s)",
      "some (b.g - b.f) or one n.(b.s)",
      "(b.f + b.k) = b.g",
      "no (b.g).A - N or b.g in N->A",
      "n in (b.g).A & n.^((b.g).A -> N)",
      "lone b.g.A",
      "all m: N | m.(b.f) = n.(b.f)",
      "some m: N | m.(b.k) in n.(b.g)",
      "n->n.(b.k) in b.s",
      "b.s.A = N",
  };
  for (const auto& body : bodies) {
    CheckProblem p;
    try {
      p = problem_from(model + "assert t { all b: B, n: N | " + body + " }\ncheck t for 3\n", "t");
    } catch (const Error& e) {
      ADD_FAILURE() << body << ": " << e.message();
      continue;
    }
    SCOPED_TRACE(body);
    check_faithful(p, plan_scopes(p, {{}, 3}), 3, 250, 31);
  }
}

// ---- transitive closure -----------------------------------------------------------

TEST(Closure, MatchesWarshall) {
  const auto s = testing_support::closure_against_warshall(100, 99);
  EXPECT_EQ(s.exhaustive, 2 + 16 + 512);
  EXPECT_GE(s.random, 200);
  EXPECT_EQ(s.mismatched, 0);
}

TEST(Closure, ChainNeedsFullDepth) {
  // A path through every atom closes only at depth n-1.
  for (int n = 2; n <= 5; ++n) {
    const testing_support::ClosureFixture fx(n);
    const auto un = static_cast<std::size_t>(n);
    testing_support::Matrix chain(un, std::vector<bool>(un));
    for (std::size_t i = 0; i + 1 < un; ++i) chain[i][i + 1] = true;
    EXPECT_EQ(fx.mismatches(chain), 0);
    EXPECT_GE(fx.t.closures[0].depth, n - 1);
  }
}

// ---- functional update ------------------------------------------------------------

TEST(Update, MatchesSetSemanticsOnFunctionalInstances) {
  for (const std::string body : {"b'.f = b.f + n->a", "b'.f = b.f - n->A", "b'.f = b.f - n->a", "b.f + n->a = b'.f"}) {
    SCOPED_TRACE(body);
    const auto s = testing_support::update_against_sets(body, 4, 1500, 41);
    EXPECT_EQ(s.mismatched, 0) << s.first_failure;
    EXPECT_GE(s.equal, 200);
    EXPECT_GE(s.differ, 200);
    if (body.find('+') != std::string::npos) {
      EXPECT_EQ(s.side_mismatched, 0);
      EXPECT_GT(s.breaks, 20);
      EXPECT_GT(s.keeps, 20);
    }
  }
}
