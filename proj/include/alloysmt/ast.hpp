#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace alloysmt {

/// 1-based source location. Column counts bytes.
struct Pos {
  int line = 0;
  int column = 0;
};

enum class ExprKind {
  Name,
  Union,
  Intersection,
  Difference,
  Join,
  Product,
  Closure,
  ReflexiveClosure,
  Call,  // fun invocation or box join `f[a, b]`
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  ExprKind kind = ExprKind::Name;
  std::string name;           // Name, Call
  std::vector<ExprPtr> args;  // operands, or call arguments
  Pos pos;
};

enum class CompareOp { Equal, NotEqual, In, Colon };

/// Shared by quantified formulas and cardinality formulas (`no e`, `some e`, ...).
/// `All` is only valid as a quantifier.
enum class Quantifier { All, Some, One, Lone, No };

/// Range multiplicity of a field or fun result.
enum class Multiplicity { One, Lone, Some, Set };

enum class FormulaKind {
  True,
  False,
  Compare,
  Not,
  And,
  Or,
  Implies,
  Iff,
  Quantified,    // quant name: lhs | kids[0]
  Cardinality,   // quant lhs
  PredCall,      // name[args]
};

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
  FormulaKind kind = FormulaKind::True;
  CompareOp op = CompareOp::Equal;
  Quantifier quant = Quantifier::All;
  std::string name;  // bound variable, or predicate name
  ExprPtr lhs;       // comparison lhs, cardinality operand, quantifier bound
  ExprPtr rhs;
  std::vector<FormulaPtr> kids;
  std::vector<ExprPtr> args;
  Pos pos;
};

struct FieldDecl {
  std::string name;
  std::vector<ExprPtr> columns;  // non-owner columns
  Multiplicity multiplicity = Multiplicity::One;
  Pos pos;
};

enum class SigKind { TopLevel, Extends, In };

struct SigDecl {
  std::string name;
  SigKind kind = SigKind::TopLevel;
  std::string parent;  // empty iff kind == TopLevel
  bool is_abstract = false;
  std::vector<FieldDecl> fields;
  Pos pos;
};

struct Param {
  std::string name;
  ExprPtr type;
  Pos pos;
};

struct FactDecl {
  std::string name;  // may be empty
  std::vector<FormulaPtr> body;
  Pos pos;
};

struct PredDecl {
  std::string name;
  std::vector<Param> params;
  std::vector<FormulaPtr> body;
  Pos pos;
};

struct FunDecl {
  std::string name;
  std::vector<Param> params;
  std::optional<Multiplicity> result_multiplicity;
  ExprPtr result_type;
  ExprPtr body;
  Pos pos;
};

struct AssertDecl {
  std::string name;
  std::vector<FormulaPtr> body;
  Pos pos;
};

struct CheckCmd {
  std::string assertion;
  std::optional<int> scope;
  Pos pos;
};

using Paragraph = std::variant<FactDecl, PredDecl, FunDecl, AssertDecl, CheckCmd>;

struct SourceModel {
  std::vector<SigDecl> sigs;
  std::vector<Paragraph> paragraphs;
  std::string source_name;

  const AssertDecl* find_assert(std::string_view name) const;
  const CheckCmd* find_check(std::string_view assertion) const;
  std::vector<std::string> assertion_names() const;
};

// Structural equality; positions and the source name are ignored.
bool structurally_equal(const Expr& a, const Expr& b);
bool structurally_equal(const Formula& a, const Formula& b);
bool structurally_equal(const SourceModel& a, const SourceModel& b);

// Node factories used by the parser and by tests.
ExprPtr make_name(std::string name, Pos pos = {});
ExprPtr make_expr(ExprKind kind, std::vector<ExprPtr> args, Pos pos = {});
ExprPtr make_call(std::string name, std::vector<ExprPtr> args, Pos pos = {});

FormulaPtr make_bool(bool value, Pos pos = {});
FormulaPtr make_compare(CompareOp op, ExprPtr lhs, ExprPtr rhs, Pos pos = {});
FormulaPtr make_not(FormulaPtr f, Pos pos = {});
FormulaPtr make_binary(FormulaKind kind, FormulaPtr a, FormulaPtr b, Pos pos = {});
FormulaPtr make_quantified(Quantifier q, std::string var, ExprPtr bound, FormulaPtr body,
                           Pos pos = {});
FormulaPtr make_cardinality(Quantifier q, ExprPtr operand, Pos pos = {});
FormulaPtr make_pred_call(std::string name, std::vector<ExprPtr> args, Pos pos = {});

std::string_view to_string(Multiplicity m);
std::string_view to_string(Quantifier q);

}  // namespace alloysmt
