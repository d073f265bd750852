#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "alloysmt/ast.hpp"

namespace alloysmt {

using TypeId = int;
constexpr TypeId kNoType = -1;

struct TypeInfo {
  std::string name;
  TypeId parent = kNoType;
  SigKind kind = SigKind::TopLevel;
  bool is_abstract = false;
  std::vector<TypeId> children;
  Pos pos;
};

/// The signature forest. Type ids are dense and follow declaration order, with every
/// parent declared before its children.
class TypeHierarchy {
 public:
  TypeId add(std::string name, TypeId parent, SigKind kind, bool is_abstract, Pos pos);

  int size() const { return static_cast<int>(types_.size()); }
  const TypeInfo& info(TypeId t) const { return types_.at(t); }
  const std::string& name(TypeId t) const { return types_.at(t).name; }
  std::optional<TypeId> find(std::string_view name) const;

  TypeId top(TypeId t) const;
  bool is_top(TypeId t) const { return types_.at(t).parent == kNoType; }
  std::vector<TypeId> tops() const;
  /// Reflexive.
  bool is_subtype(TypeId sub, TypeId super) const;
  /// Least common ancestor, or kNoType for different top-level types.
  TypeId lca(TypeId a, TypeId b) const;
  /// True when no atom can belong to both: different trees, or the paths to them leave
  /// their common ancestor through two distinct `extends` children.
  bool disjoint(TypeId a, TypeId b) const;
  std::vector<TypeId> extends_children(TypeId t) const;
  /// Abstract types with extends-children: every atom is in some child.
  bool is_exhaustive(TypeId t) const;
  /// All proper descendants, in id order.
  std::vector<TypeId> descendants(TypeId t) const;
  int depth(TypeId t) const;

 private:
  std::vector<TypeInfo> types_;
};

struct RelationSchema {
  std::string name;
  std::vector<TypeId> columns;  // owner first
  Multiplicity multiplicity = Multiplicity::One;
  /// Per column, the id of a binary relation from the owner that restricts the column
  /// (`addr: names -> some Target`), or -1.
  std::vector<int> restriction;
  Pos pos;

  int arity() const { return static_cast<int>(columns.size()); }
  bool functional() const {
    return multiplicity == Multiplicity::One || multiplicity == Multiplicity::Lone;
  }
  bool restricted() const;
  TypeId range() const { return columns.back(); }
};

// ---- relational IR ------------------------------------------------------------------

enum class RKind {
  Type,      // id = type
  Relation,  // id = relation
  Var,       // id = variable id; quantified variables are scalars
  Atom,      // id = type, index = atom number (finitized constants)
  Iden,      // identity over cols[0]
  Union,
  Intersection,
  Difference,
  Join,
  Product,
  Closure,
  Call,      // id = fun index
};

struct RExpr;
using RExprPtr = std::shared_ptr<const RExpr>;

struct RExpr {
  RKind kind = RKind::Type;
  int id = -1;
  int index = -1;
  std::string name;            // display name
  std::vector<TypeId> cols;    // column types; size is the arity
  std::vector<RExprPtr> args;
  Pos pos;

  int arity() const { return static_cast<int>(cols.size()); }
};

enum class FKind {
  True,
  False,
  Not,
  And,      // n-ary
  Or,       // n-ary
  Implies,
  Iff,
  Subset,   // a in b
  Equal,    // a = b
  Mult,     // quant a, quant in {Some, One, Lone, No}
  Quant,    // quant var: a | kids[0]
  Call,     // pred invocation; id = pred index
};

struct RFormula;
using RFormulaPtr = std::shared_ptr<const RFormula>;

struct RFormula {
  FKind kind = FKind::True;
  Quantifier quant = Quantifier::All;
  std::vector<RFormulaPtr> kids;
  RExprPtr a;
  RExprPtr b;
  int var = -1;
  std::string var_name;
  int id = -1;
  std::vector<RExprPtr> args;
  Pos pos;
};

struct VarDecl {
  int id = -1;
  std::string name;
  RExprPtr bound;
  Pos pos;
};

/// Node builders. Expression builders compute column types and throw Error(Type) on
/// arity or compatibility violations.
namespace ir {

RExprPtr type(const TypeHierarchy& h, TypeId t, Pos pos = {});
RExprPtr relation(const std::vector<RelationSchema>& rels, int id, Pos pos = {});
RExprPtr var(int id, std::string name, std::vector<TypeId> cols, Pos pos = {});
RExprPtr atom(const TypeHierarchy& h, TypeId t, int index, Pos pos = {});
RExprPtr iden(TypeId t, Pos pos = {});
RExprPtr binary(const TypeHierarchy& h, RKind kind, RExprPtr a, RExprPtr b, Pos pos = {});
RExprPtr closure(const TypeHierarchy& h, RExprPtr r, Pos pos = {});
RExprPtr call(int fun, std::string name, std::vector<RExprPtr> args, std::vector<TypeId> result,
              Pos pos = {});

RFormulaPtr truth(bool value, Pos pos = {});
RFormulaPtr negate(RFormulaPtr f, Pos pos = {});
/// Flattens nested conjunctions and drops `true`; a single kid is returned as is.
RFormulaPtr conj(std::vector<RFormulaPtr> kids, Pos pos = {});
RFormulaPtr disj(std::vector<RFormulaPtr> kids, Pos pos = {});
RFormulaPtr implies(RFormulaPtr a, RFormulaPtr b, Pos pos = {});
RFormulaPtr iff(RFormulaPtr a, RFormulaPtr b, Pos pos = {});
RFormulaPtr subset(const TypeHierarchy& h, RExprPtr a, RExprPtr b, Pos pos = {});
RFormulaPtr equal(const TypeHierarchy& h, RExprPtr a, RExprPtr b, Pos pos = {});
RFormulaPtr mult(Quantifier q, RExprPtr e, Pos pos = {});
RFormulaPtr quant(Quantifier q, int var, std::string name, RExprPtr bound, RFormulaPtr body,
                  Pos pos = {});
RFormulaPtr call(int pred, std::string name, std::vector<RExprPtr> args, Pos pos = {});

}  // namespace ir

/// Replaces free occurrences of variables. Binders inside `f` are given fresh ids from
/// `next_var`, so the result never captures a substituted variable.
RExprPtr substitute(const TypeHierarchy& h, const RExprPtr& e, const std::map<int, RExprPtr>& sub,
                    int& next_var);
RFormulaPtr substitute(const TypeHierarchy& h, const RFormulaPtr& f,
                       const std::map<int, RExprPtr>& sub, int& next_var);

bool contains_closure(const RExprPtr& e);
bool contains_closure(const RFormulaPtr& f);
bool contains_call(const RFormulaPtr& f);
std::vector<int> free_vars(const RFormulaPtr& f);

/// Alloy-like rendering for diagnostics and tests.
std::string to_string(const RExpr& e);
std::string to_string(const RFormula& f);

}  // namespace alloysmt
