#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "alloysmt/ir.hpp"
#include "alloysmt/sema.hpp"

namespace alloysmt {

enum class BoundReason { ClosureOperand, InlinedUniversal, UserForced };

std::string_view to_string(BoundReason r);

struct TypeBound {
  int atoms = 0;
  BoundReason reason = BoundReason::UserForced;
  std::string detail;
};

struct ClosureSite {
  std::string text;       // the `^` expression as written after inlining
  TypeId type = kNoType;  // domain column of the operand
  int depth = 0;
  Pos pos;
};

/// Which types are finitized, why, and how deep each transitive closure is unrolled.
/// Types absent from `bounds` stay unbounded.
struct ScopePlan {
  std::map<TypeId, TypeBound> bounds;
  std::vector<ClosureSite> closures;

  bool unbounded() const { return bounds.empty(); }
  std::optional<int> bound(TypeId t) const;
  /// The nearest bounded type among `t` and its ancestors, or kNoType. Every atom of `t`
  /// is one of that type's constants.
  TypeId cover(const TypeHierarchy& h, TypeId t) const;
  /// One line per bounded type, or "0 types finitized".
  std::string summary(const TypeHierarchy& h) const;
};

struct UserBounds {
  std::map<std::string, int> types;
  /// Default for types that must be finitized and have no explicit bound.
  std::optional<int> scope;
};

/// Bounds the domain type of every closure operand and the variable type of every
/// universal enclosing a closure, plus the user-forced types. Throws Error(Scope) when a
/// required type has no bound, and Error(Usage) for unknown type names or bounds below 1.
ScopePlan plan_scopes(const CheckProblem& p, const UserBounds& user);

/// Unroll depth for a closure: the bound of its operand's domain column type. Throws
/// Error(Scope) when that type is unbounded.
int required_tc_depth(const TypeHierarchy& h, const ScopePlan& plan, const RExpr& closure);

/// Instantiates top-level universals over bounded types once per atom constant. Nested
/// conjunctions are flattened; an instance is guarded by membership of the constant when
/// the constant may fall outside the quantifier's range.
std::vector<RFormulaPtr> inline_universals(const CheckProblem& p, const RFormulaPtr& f,
                                           const ScopePlan& plan);

/// Same instantiation applied everywhere inside a formula; each bounded universal becomes
/// a conjunction of its instances.
RFormulaPtr expand_universals(const CheckProblem& p, const RFormulaPtr& f, const ScopePlan& plan);

/// True when every constant of the bounded type `cover` is necessarily inside `range`,
/// so instances need no membership guard.
bool constants_inside(const CheckProblem& p, const RExpr& range, TypeId cover);

}  // namespace alloysmt
