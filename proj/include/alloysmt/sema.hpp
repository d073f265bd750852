#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "alloysmt/ast.hpp"
#include "alloysmt/ir.hpp"

namespace alloysmt {

struct PredDef {
  std::string name;
  std::vector<VarDecl> params;
  RFormulaPtr body;
  Pos pos;
};

struct FunDef {
  std::string name;
  std::vector<VarDecl> params;
  std::optional<Multiplicity> result_multiplicity;
  std::vector<TypeId> result;
  RExprPtr body;
  Pos pos;
};

struct NamedFormula {
  std::string name;
  RFormulaPtr formula;
  Pos pos;
};

/// A resolved and type-checked model. Predicate and function invocations are still
/// present as Call nodes.
struct CheckedModel {
  std::string source_name;
  TypeHierarchy hierarchy;
  std::vector<RelationSchema> relations;
  std::vector<PredDef> preds;
  std::vector<FunDef> funs;
  std::vector<NamedFormula> facts;    // one entry per formula of each fact block
  std::vector<NamedFormula> asserts;  // body conjoined
  std::vector<CheckCmd> checks;
  int next_var = 0;

  std::optional<int> find_relation(std::string_view name) const;
  const NamedFormula* find_assert(std::string_view name) const;
  const CheckCmd* find_check(std::string_view assertion) const;
};

CheckedModel resolve_and_check(const SourceModel& model);

/// Replaces every predicate and function invocation by its body with arguments
/// substituted. Throws Error(Type) on recursion.
RFormulaPtr inline_invocations(const CheckedModel& model, const RFormulaPtr& f, int& next_var);
RExprPtr inline_invocations(const CheckedModel& model, const RExprPtr& e, int& next_var);

/// Negation normal form. Implications and biconditionals are rewritten, negation is
/// pushed to atoms, `no`/`one`/`lone` quantifiers are expressed with `all` and `some`.
RFormulaPtr to_nnf(const TypeHierarchy& h, const RFormulaPtr& f, int& next_var);

/// NNF of the negated assertion.
RFormulaPtr build_goal(const TypeHierarchy& h, const RFormulaPtr& assertion, int& next_var);

struct SkolemConst {
  std::string name;
  TypeId type = kNoType;
  int var = -1;
  /// The constant ranges over atoms only, never over the type's non-value.
  bool excludes_nonvalue = false;
};

struct Skolemized {
  std::vector<SkolemConst> skolems;
  RFormulaPtr goal;
};

/// Strips the existentials reachable through conjunctions. Bound variables become free
/// variables of the returned goal, listed in `skolems`; a non-type bound adds a membership
/// conjunct. Throws Error(OutOfScope) for an existential below a universal.
Skolemized skolemize(const TypeHierarchy& h, const RFormulaPtr& goal);

struct CheckProblem {
  std::string source_name;
  std::string assertion;
  Pos assertion_pos;
  TypeHierarchy hierarchy;
  std::vector<RelationSchema> relations;
  std::vector<NamedFormula> facts;  // inlined, in NNF
  std::vector<SkolemConst> skolems;
  RFormulaPtr goal;                 // skolemized, in NNF
  std::optional<int> scope;         // from the `check ... for n` command
  int next_var = 0;

  std::optional<int> skolem_of_var(int var) const;
};

/// Full semantic pipeline for one assertion.
CheckProblem build_problem(const CheckedModel& model, std::string_view assertion);

/// Relations whose encoding reserves a non-value in the sort of `top`.
bool has_nonvalue(const CheckProblem& p, TypeId top);

}  // namespace alloysmt
