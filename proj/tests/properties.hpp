#pragma once

// Encoding properties shared by the unit tests and the acceptance binary.

#include <map>
#include <random>
#include <string>
#include <vector>

#include "alloysmt/parser.hpp"
#include "alloysmt/translate.hpp"
#include "random_instance.hpp"

namespace testing_support {

inline alloysmt::CheckProblem problem_from(const std::string& text, const std::string& assertion) {
  using namespace alloysmt;
  return build_problem(resolve_and_check(parse_source(text, "inline.als")), assertion);
}

inline std::optional<std::vector<int>> random_skolems(const alloysmt::CheckProblem& p, const alloysmt::Instance& inst,
                                                      std::mt19937& rng) {
  std::vector<int> out;
  for (const auto& sk : p.skolems) {
    const auto members = inst.types[static_cast<std::size_t>(sk.type)].tuples();
    if (members.empty()) return std::nullopt;
    out.push_back(members[std::uniform_int_distribution<std::size_t>(0, members.size() - 1)(rng)][0]);
  }
  return out;
}

using Matrix = std::vector<std::vector<bool>>;

inline Matrix warshall(Matrix m) {
  const auto n = m.size();
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (m[i][k] && m[k][j]) m[i][j] = true;
  return m;
}

/// `^r` over `sig A { r: set A }` with A finitized to n atoms, unrolled as in any script.
struct ClosureFixture {
  alloysmt::CheckProblem p;
  alloysmt::Translation t;
  std::vector<alloysmt::smt::Term> cells;  // membership of (A$i, A$j) in ^r, row major

  explicit ClosureFixture(int n) {
    using namespace alloysmt;
    p = problem_from("sig A { r: set A }\nassert t { all x: A | x in x.^r }\ncheck t for 3\n", "t");
    t = translate(p, plan_scopes(p, {{{"A", n}}, std::nullopt}));
    const auto closure = ir::closure(p.hierarchy, ir::relation(p.relations, 0));
    FormulaTranslator ft(p, t);
    const auto& consts = t.types[static_cast<std::size_t>(*p.hierarchy.find("A"))].constants;
    for (const auto& a : consts)
      for (const auto& b : consts) cells.push_back(ft.membership(closure, {smt::sym(a), smt::sym(b)}));
    for (auto& c : ft.take_definitions()) t.script.add(c.term, c.comment);
  }

  alloysmt::Instance instance(const Matrix& rel) const {
    using namespace alloysmt;
    const int n = static_cast<int>(rel.size());
    Instance inst;
    inst.atoms = n;
    for (int i = 0; i < n; ++i) inst.atom_names.push_back("A$" + std::to_string(i));
    inst.types.assign(1, TupleSet(1, n));
    for (int i = 0; i < n; ++i) inst.types[0].insert({i});
    TupleSet r(2, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (rel[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) r.insert({i, j});
    inst.relations = {r};
    return inst;
  }

  /// Cells where the unrolled closure differs from Warshall's.
  int mismatches(const Matrix& rel) const {
    const auto n = rel.size();
    const auto interp = alloysmt::to_interpretation(p, t, instance(rel), {});
    const auto want = warshall(rel);
    int bad = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (interp.holds(cells[i * n + j]) != want[i][j]) ++bad;
    return bad;
  }
};

struct ClosureStats {
  int exhaustive = 0;  // relations on 1..3 atoms
  int random = 0;      // relations on 4..5 atoms
  int mismatched = 0;  // relations with at least one wrong cell
};

inline ClosureStats closure_against_warshall(int random_per_size, unsigned seed) {
  ClosureStats s;
  for (int n = 1; n <= 3; ++n) {
    const ClosureFixture fx(n);
    const auto un = static_cast<std::size_t>(n);
    for (unsigned bits = 0; bits < (1u << (n * n)); ++bits) {
      Matrix rel(un, std::vector<bool>(un));
      for (std::size_t k = 0; k < un * un; ++k) rel[k / un][k % un] = (bits >> k) & 1;
      if (fx.mismatches(rel)) ++s.mismatched;
      ++s.exhaustive;
    }
  }
  std::mt19937 rng(seed);
  for (int n : {4, 5}) {
    const ClosureFixture fx(n);
    const auto un = static_cast<std::size_t>(n);
    for (int trial = 0; trial < random_per_size; ++trial) {
      std::bernoulli_distribution edge(std::uniform_real_distribution<double>(0.05, 0.6)(rng));
      Matrix rel(un, std::vector<bool>(un));
      for (auto& row : rel)
        for (std::size_t j = 0; j < un; ++j) row[j] = edge(rng);
      if (fx.mismatches(rel)) ++s.mismatched;
      ++s.random;
    }
  }
  return s;
}

inline bool functional(const alloysmt::TupleSet& binary) {
  std::map<int, int> seen;
  for (const auto& row : binary.tuples()) {
    const auto [it, fresh] = seen.emplace(row[0], row[1]);
    if (!fresh && it->second != row[1]) return false;
  }
  return true;
}

struct UpdateStats {
  int instances = 0;       // well-formed instances compared
  int equal = 0;           // set-theoretic equality held
  int differ = 0;
  int mismatched = 0;      // encoding disagreed with set semantics
  int breaks = 0;          // union would break functionality
  int keeps = 0;
  int side_mismatched = 0; // side condition disagreed with functionality of the union
  std::string first_failure;
};

/// Compares the function-update encoding of `b'.f = <update>` with set semantics on random
/// instances of `sig B { f: N -> lone A }` with up to `scope` atoms per type.
inline UpdateStats update_against_sets(const std::string& body, int scope, int trials, unsigned seed) {
  using namespace alloysmt;
  UpdateStats s;
  const auto p = problem_from("sig N, A {}\nsig B { f: N -> lone A }\nassert t { all b, b': B, n: N, a: A | " + body +
                                  " }\ncheck t for " + std::to_string(scope) + "\n",
                              "t");
  const auto& h = p.hierarchy;
  auto t = translate(p, plan_scopes(p, {}));
  FormulaTranslator ft(p, t);
  // The goal is the negated equality; translate the equality itself.
  const RFormulaPtr eq = p.goal->kids.at(0);
  const auto is_slice = [](const RExpr& e) {
    return e.kind == RKind::Join && e.args[0]->kind == RKind::Var && e.args[0]->name == "b'";
  };
  const RExprPtr update = is_slice(*eq->a) ? eq->b : eq->a;
  const bool is_union = update->kind == RKind::Union;
  const smt::Term encoded = ft.formula(eq);
  // The union encoding is its side condition conjoined with a quantified pointwise update.
  std::vector<smt::Term> side_parts;
  if (is_union && encoded->is_list && smt::is_atom(encoded->kids[0], "and")) {
    for (std::size_t i = 1; i < encoded->kids.size(); ++i) {
      const auto& k = encoded->kids[i];
      if (!(k->is_list && smt::is_atom(k->kids[0], "forall"))) side_parts.push_back(k);
    }
  }
  const smt::Term side = smt::mk_and(side_parts);
  std::mt19937 rng(seed);
  for (int trial = 0; trial < trials; ++trial) {
    auto inst = random_instance(h, p.relations, scope, rng);
    const auto sk = random_skolems(p, inst, rng);
    if (!sk) continue;
    const auto bind_all = [&](Evaluator& ev) {
      for (std::size_t i = 0; i < p.skolems.size(); ++i)
        ev.bind(p.skolems[i].var, TupleSet::singleton(inst.atoms, (*sk)[i]));
    };
    // Half of the time b' becomes the set-theoretic result, when that is functional, so
    // that equality is not vanishingly rare.
    if (trial % 2 == 0 && (*sk)[0] != (*sk)[1]) {
      Evaluator ev(h, inst);
      bind_all(ev);
      const auto image = ev.eval(*update);
      if (functional(image)) {
        TupleSet f = inst.relations[0];
        for (const auto& row : inst.relations[0].tuples())
          if (row[0] == (*sk)[1]) f.erase(row);
        for (const auto& row : image.tuples()) f.insert({(*sk)[1], row[0], row[1]});
        inst.relations[0] = f;
      }
    }
    if (well_formedness_violation(h, p.relations, inst)) continue;
    Evaluator ev(h, inst);
    bind_all(ev);
    const bool want = ev.holds(*eq);
    const auto interp = to_interpretation(p, t, inst, *sk);
    ++s.instances;
    (want ? s.equal : s.differ)++;
    if (interp.holds(encoded) != want) {
      ++s.mismatched;
      if (s.first_failure.empty()) s.first_failure = render(p, Counterexample{inst, *sk});
    }
    if (is_union) {
      const bool keeps = functional(ev.eval(*update));
      (keeps ? s.keeps : s.breaks)++;
      if (side_parts.empty() || interp.holds(side) != keeps) ++s.side_mismatched;
    }
  }
  return s;
}

}  // namespace testing_support
