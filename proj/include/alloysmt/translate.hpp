#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "alloysmt/finitization.hpp"
#include "alloysmt/oracle.hpp"
#include "alloysmt/sema.hpp"
#include "alloysmt/smt.hpp"

namespace alloysmt {

/// How one type is represented. Top-level types are sorts; every other type is a
/// membership predicate over its top-level sort.
struct TypeEncoding {
  std::string sort;                    // symbol of the top-level sort
  std::string membership;              // `isS` symbol, empty for top-level types
  std::vector<std::string> constants;  // atom constants when the type is bounded
};

enum class EncodingStyle { Function, BooleanColumn };

struct RelationEncoding {
  EncodingStyle style = EncodingStyle::Function;
  std::string symbol;
  std::optional<std::string> nonvalue;    // lone relations
  std::optional<std::string> choose;      // some relations
  std::optional<std::string> one_target;  // some relations
  /// Subtype of the second column whose rows are exactly the oneTarget row, from a folded
  /// `all b: B, a: S | lone a.(b.r)` fact.
  TypeId folded = kNoType;
};

/// Definition of one unrolled closure: `symbol(x, y, params...)` is membership in `^r`.
struct ClosureEncoding {
  std::string symbol;
  std::vector<std::string> levels;  // iterJoin level symbols, depth 1 first
  std::string sort;
  int depth = 0;
  std::vector<std::string> param_sorts;  // sorts of the extra free-variable parameters
  std::string operand;                   // rendering of r
};

struct Translation {
  smt::Script script;
  ScopePlan plan;
  std::vector<TypeEncoding> types;  // by TypeId
  std::map<TypeId, std::string> nonvalues;  // by top-level type
  std::vector<RelationEncoding> relations;  // by relation id
  std::vector<std::string> skolems;         // by skolem index
  std::vector<ClosureEncoding> closures;
  std::vector<std::string> folded_facts;
  /// Every symbol in use, so later additions stay fresh.
  std::set<std::string> symbols;
  std::map<std::string, int> closure_index;  // operand key -> closures index

  std::string text() const { return script.str(); }
};

struct TranslateOptions {
  bool get_model = true;
};

/// Compiles the problem into one SMT-LIB script. Facts and the negated assertion become
/// assertions; a satisfying model is a counterexample.
Translation translate(const CheckProblem& p, const ScopePlan& plan, const TranslateOptions& options = {});

/// Translates single formulas against the declarations of a finished translation, for
/// tests and for evaluating the encoding directly. Free variables must be skolems.
class FormulaTranslator {
 public:
  FormulaTranslator(const CheckProblem& p, Translation& t);
  ~FormulaTranslator();
  FormulaTranslator(const FormulaTranslator&) = delete;
  FormulaTranslator& operator=(const FormulaTranslator&) = delete;

  smt::Term formula(const RFormulaPtr& f);
  /// Membership of `tuple` in `e`.
  smt::Term membership(const RExprPtr& e, const std::vector<smt::Term>& tuple);
  /// Definitions created while translating, in creation order.
  std::vector<smt::Command> take_definitions();

  struct Impl;
  Impl& impl() { return *impl_; }

 private:
  std::unique_ptr<Impl> impl_;
};

/// Interprets the script's symbols by a relational instance: sorts are the top-level
/// atoms plus one element per non-value, membership predicates and relations follow the
/// instance, auxiliary functions get a consistent witness, and the atom constants of a
/// bounded type enumerate its members (repeating the last one when there are fewer).
smt::Interpretation to_interpretation(const CheckProblem& p, const Translation& t, const Instance& inst,
                                      const std::vector<int>& skolem_atoms);

}  // namespace alloysmt
