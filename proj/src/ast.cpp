#include "alloysmt/ast.hpp"

namespace alloysmt {

const AssertDecl* SourceModel::find_assert(std::string_view name) const {
  for (const auto& p : paragraphs) {
    if (const auto* a = std::get_if<AssertDecl>(&p); a && a->name == name) return a;
  }
  return nullptr;
}

const CheckCmd* SourceModel::find_check(std::string_view assertion) const {
  for (const auto& p : paragraphs) {
    if (const auto* c = std::get_if<CheckCmd>(&p); c && c->assertion == assertion) return c;
  }
  return nullptr;
}

std::vector<std::string> SourceModel::assertion_names() const {
  std::vector<std::string> names;
  for (const auto& p : paragraphs) {
    if (const auto* a = std::get_if<AssertDecl>(&p)) names.push_back(a->name);
  }
  return names;
}

namespace {

bool equal_ptr(const ExprPtr& a, const ExprPtr& b) {
  if (!a || !b) return !a && !b;
  return structurally_equal(*a, *b);
}

bool equal_ptr(const FormulaPtr& a, const FormulaPtr& b) {
  if (!a || !b) return !a && !b;
  return structurally_equal(*a, *b);
}

template <class T>
bool equal_all(const std::vector<T>& a, const std::vector<T>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!equal_ptr(a[i], b[i])) return false;
  }
  return true;
}

bool equal_params(const std::vector<Param>& a, const std::vector<Param>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].name != b[i].name || !equal_ptr(a[i].type, b[i].type)) return false;
  }
  return true;
}

bool equal_paragraph(const Paragraph& a, const Paragraph& b) {
  if (a.index() != b.index()) return false;
  return std::visit(
      [&](const auto& lhs) -> bool {
        using T = std::decay_t<decltype(lhs)>;
        const auto& rhs = std::get<T>(b);
        if constexpr (std::is_same_v<T, FactDecl>) {
          return lhs.name == rhs.name && equal_all(lhs.body, rhs.body);
        } else if constexpr (std::is_same_v<T, PredDecl>) {
          return lhs.name == rhs.name && equal_params(lhs.params, rhs.params) &&
                 equal_all(lhs.body, rhs.body);
        } else if constexpr (std::is_same_v<T, FunDecl>) {
          return lhs.name == rhs.name && equal_params(lhs.params, rhs.params) &&
                 lhs.result_multiplicity == rhs.result_multiplicity &&
                 equal_ptr(lhs.result_type, rhs.result_type) && equal_ptr(lhs.body, rhs.body);
        } else if constexpr (std::is_same_v<T, AssertDecl>) {
          return lhs.name == rhs.name && equal_all(lhs.body, rhs.body);
        } else {
          return lhs.assertion == rhs.assertion && lhs.scope == rhs.scope;
        }
      },
      a);
}

}  // namespace

bool structurally_equal(const Expr& a, const Expr& b) {
  return a.kind == b.kind && a.name == b.name && equal_all(a.args, b.args);
}

bool structurally_equal(const Formula& a, const Formula& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case FormulaKind::True:
    case FormulaKind::False:
      return true;
    case FormulaKind::Compare:
      return a.op == b.op && equal_ptr(a.lhs, b.lhs) && equal_ptr(a.rhs, b.rhs);
    case FormulaKind::Not:
    case FormulaKind::And:
    case FormulaKind::Or:
    case FormulaKind::Implies:
    case FormulaKind::Iff:
      return equal_all(a.kids, b.kids);
    case FormulaKind::Quantified:
      return a.quant == b.quant && a.name == b.name && equal_ptr(a.lhs, b.lhs) &&
             equal_all(a.kids, b.kids);
    case FormulaKind::Cardinality:
      return a.quant == b.quant && equal_ptr(a.lhs, b.lhs);
    case FormulaKind::PredCall:
      return a.name == b.name && equal_all(a.args, b.args);
  }
  return false;
}

bool structurally_equal(const SourceModel& a, const SourceModel& b) {
  if (a.sigs.size() != b.sigs.size() || a.paragraphs.size() != b.paragraphs.size()) return false;
  for (std::size_t i = 0; i < a.sigs.size(); ++i) {
    const auto& x = a.sigs[i];
    const auto& y = b.sigs[i];
    if (x.name != y.name || x.kind != y.kind || x.parent != y.parent ||
        x.is_abstract != y.is_abstract || x.fields.size() != y.fields.size()) {
      return false;
    }
    for (std::size_t j = 0; j < x.fields.size(); ++j) {
      const auto& f = x.fields[j];
      const auto& g = y.fields[j];
      if (f.name != g.name || f.multiplicity != g.multiplicity || !equal_all(f.columns, g.columns)) {
        return false;
      }
    }
  }
  for (std::size_t i = 0; i < a.paragraphs.size(); ++i) {
    if (!equal_paragraph(a.paragraphs[i], b.paragraphs[i])) return false;
  }
  return true;
}

ExprPtr make_name(std::string name, Pos pos) {
  return std::make_shared<const Expr>(Expr{ExprKind::Name, std::move(name), {}, pos});
}

ExprPtr make_expr(ExprKind kind, std::vector<ExprPtr> args, Pos pos) {
  return std::make_shared<const Expr>(Expr{kind, {}, std::move(args), pos});
}

ExprPtr make_call(std::string name, std::vector<ExprPtr> args, Pos pos) {
  return std::make_shared<const Expr>(Expr{ExprKind::Call, std::move(name), std::move(args), pos});
}

FormulaPtr make_bool(bool value, Pos pos) {
  Formula f;
  f.kind = value ? FormulaKind::True : FormulaKind::False;
  f.pos = pos;
  return std::make_shared<const Formula>(std::move(f));
}

FormulaPtr make_compare(CompareOp op, ExprPtr lhs, ExprPtr rhs, Pos pos) {
  Formula f;
  f.kind = FormulaKind::Compare;
  f.op = op;
  f.lhs = std::move(lhs);
  f.rhs = std::move(rhs);
  f.pos = pos;
  return std::make_shared<const Formula>(std::move(f));
}

FormulaPtr make_not(FormulaPtr inner, Pos pos) {
  Formula f;
  f.kind = FormulaKind::Not;
  f.kids.push_back(std::move(inner));
  f.pos = pos;
  return std::make_shared<const Formula>(std::move(f));
}

FormulaPtr make_binary(FormulaKind kind, FormulaPtr a, FormulaPtr b, Pos pos) {
  Formula f;
  f.kind = kind;
  f.kids = {std::move(a), std::move(b)};
  f.pos = pos;
  return std::make_shared<const Formula>(std::move(f));
}

FormulaPtr make_quantified(Quantifier q, std::string var, ExprPtr bound, FormulaPtr body, Pos pos) {
  Formula f;
  f.kind = FormulaKind::Quantified;
  f.quant = q;
  f.name = std::move(var);
  f.lhs = std::move(bound);
  f.kids.push_back(std::move(body));
  f.pos = pos;
  return std::make_shared<const Formula>(std::move(f));
}

FormulaPtr make_cardinality(Quantifier q, ExprPtr operand, Pos pos) {
  Formula f;
  f.kind = FormulaKind::Cardinality;
  f.quant = q;
  f.lhs = std::move(operand);
  f.pos = pos;
  return std::make_shared<const Formula>(std::move(f));
}

FormulaPtr make_pred_call(std::string name, std::vector<ExprPtr> args, Pos pos) {
  Formula f;
  f.kind = FormulaKind::PredCall;
  f.name = std::move(name);
  f.args = std::move(args);
  f.pos = pos;
  return std::make_shared<const Formula>(std::move(f));
}

std::string_view to_string(Multiplicity m) {
  switch (m) {
    case Multiplicity::One: return "one";
    case Multiplicity::Lone: return "lone";
    case Multiplicity::Some: return "some";
    case Multiplicity::Set: return "set";
  }
  return "?";
}

std::string_view to_string(Quantifier q) {
  switch (q) {
    case Quantifier::All: return "all";
    case Quantifier::Some: return "some";
    case Quantifier::One: return "one";
    case Quantifier::Lone: return "lone";
    case Quantifier::No: return "no";
  }
  return "?";
}

}  // namespace alloysmt
