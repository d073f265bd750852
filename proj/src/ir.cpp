#include "alloysmt/ir.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

#include "alloysmt/diagnostics.hpp"

namespace alloysmt {

// ---- TypeHierarchy --------------------------------------------------------------------

TypeId TypeHierarchy::add(std::string name, TypeId parent, SigKind kind, bool is_abstract, Pos pos) {
  const TypeId id = size();
  types_.push_back(TypeInfo{std::move(name), parent, kind, is_abstract, {}, pos});
  if (parent != kNoType) types_.at(parent).children.push_back(id);
  return id;
}

std::optional<TypeId> TypeHierarchy::find(std::string_view name) const {
  for (TypeId t = 0; t < size(); ++t) {
    if (types_[t].name == name) return t;
  }
  return std::nullopt;
}

TypeId TypeHierarchy::top(TypeId t) const {
  while (types_.at(t).parent != kNoType) t = types_[t].parent;
  return t;
}

std::vector<TypeId> TypeHierarchy::tops() const {
  std::vector<TypeId> out;
  for (TypeId t = 0; t < size(); ++t) {
    if (is_top(t)) out.push_back(t);
  }
  return out;
}

bool TypeHierarchy::is_subtype(TypeId sub, TypeId super) const {
  for (TypeId t = sub; t != kNoType; t = types_.at(t).parent) {
    if (t == super) return true;
  }
  return false;
}

int TypeHierarchy::depth(TypeId t) const {
  int d = 0;
  while (types_.at(t).parent != kNoType) {
    t = types_[t].parent;
    ++d;
  }
  return d;
}

TypeId TypeHierarchy::lca(TypeId a, TypeId b) const {
  if (top(a) != top(b)) return kNoType;
  while (depth(a) > depth(b)) a = types_[a].parent;
  while (depth(b) > depth(a)) b = types_[b].parent;
  while (a != b) {
    a = types_[a].parent;
    b = types_[b].parent;
  }
  return a;
}

bool TypeHierarchy::disjoint(TypeId a, TypeId b) const {
  const TypeId c = lca(a, b);
  if (c == kNoType) return true;
  if (c == a || c == b) return false;
  auto child_below = [&](TypeId t) {
    while (types_[t].parent != c) t = types_[t].parent;
    return t;
  };
  const TypeId ca = child_below(a);
  const TypeId cb = child_below(b);
  return ca != cb && types_[ca].kind == SigKind::Extends && types_[cb].kind == SigKind::Extends;
}

std::vector<TypeId> TypeHierarchy::extends_children(TypeId t) const {
  std::vector<TypeId> out;
  for (TypeId c : types_.at(t).children) {
    if (types_[c].kind == SigKind::Extends) out.push_back(c);
  }
  return out;
}

bool TypeHierarchy::is_exhaustive(TypeId t) const {
  return types_.at(t).is_abstract && !extends_children(t).empty();
}

std::vector<TypeId> TypeHierarchy::descendants(TypeId t) const {
  std::vector<TypeId> out;
  for (TypeId d = 0; d < size(); ++d) {
    if (d != t && is_subtype(d, t)) out.push_back(d);
  }
  return out;
}

bool RelationSchema::restricted() const {
  return std::any_of(restriction.begin(), restriction.end(), [](int r) { return r >= 0; });
}

// ---- builders -------------------------------------------------------------------------

namespace ir {

namespace {

RExprPtr finish(RExpr e) { return std::make_shared<const RExpr>(std::move(e)); }
RFormulaPtr finish(RFormula f) { return std::make_shared<const RFormula>(std::move(f)); }

std::string cols_text(const TypeHierarchy& h, const std::vector<TypeId>& cols) {
  std::string s;
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (i) s += "->";
    s += h.name(cols[i]);
  }
  return s;
}

[[noreturn]] void type_error(const TypeHierarchy& h, const std::string& what, const RExprPtr& a,
                             const RExprPtr& b, Pos pos) {
  std::string msg = what + ": " + to_string(*a) + " (" + cols_text(h, a->cols) + ")";
  if (b) msg += " and " + to_string(*b) + " (" + cols_text(h, b->cols) + ")";
  throw Error(ErrorKind::Type, msg, pos);
}

}  // namespace

RExprPtr type(const TypeHierarchy& h, TypeId t, Pos pos) {
  return finish(RExpr{RKind::Type, t, -1, h.name(t), {t}, {}, pos});
}

RExprPtr relation(const std::vector<RelationSchema>& rels, int id, Pos pos) {
  const auto& r = rels.at(id);
  return finish(RExpr{RKind::Relation, id, -1, r.name, r.columns, {}, pos});
}

RExprPtr var(int id, std::string name, std::vector<TypeId> cols, Pos pos) {
  return finish(RExpr{RKind::Var, id, -1, std::move(name), std::move(cols), {}, pos});
}

RExprPtr atom(const TypeHierarchy& h, TypeId t, int index, Pos pos) {
  return finish(RExpr{RKind::Atom, t, index, h.name(t) + "$" + std::to_string(index + 1), {t}, {}, pos});
}

RExprPtr iden(TypeId t, Pos pos) { return finish(RExpr{RKind::Iden, t, -1, "iden", {t, t}, {}, pos}); }

RExprPtr binary(const TypeHierarchy& h, RKind kind, RExprPtr a, RExprPtr b, Pos pos) {
  RExpr e;
  e.kind = kind;
  e.pos = pos;
  switch (kind) {
    case RKind::Union:
    case RKind::Intersection:
    case RKind::Difference: {
      if (a->arity() != b->arity()) type_error(h, "arity mismatch", a, b, pos);
      for (int i = 0; i < a->arity(); ++i) {
        const TypeId x = a->cols[i];
        const TypeId y = b->cols[i];
        if (h.top(x) != h.top(y)) type_error(h, "incompatible column types", a, b, pos);
        if (kind == RKind::Union) {
          e.cols.push_back(h.lca(x, y));
        } else if (kind == RKind::Difference) {
          e.cols.push_back(x);
        } else if (h.is_subtype(y, x)) {
          e.cols.push_back(y);
        } else if (h.is_subtype(x, y) || !h.disjoint(x, y)) {
          e.cols.push_back(x);
        } else {
          type_error(h, "intersection of disjoint types", a, b, pos);
        }
      }
      break;
    }
    case RKind::Join: {
      if (a->arity() + b->arity() - 2 < 1) type_error(h, "join yields arity below one", a, b, pos);
      const TypeId x = a->cols.back();
      const TypeId y = b->cols.front();
      if (h.disjoint(x, y)) type_error(h, "joining incompatible column types", a, b, pos);
      e.cols.assign(a->cols.begin(), a->cols.end() - 1);
      e.cols.insert(e.cols.end(), b->cols.begin() + 1, b->cols.end());
      break;
    }
    case RKind::Product:
      e.cols = a->cols;
      e.cols.insert(e.cols.end(), b->cols.begin(), b->cols.end());
      break;
    default:
      throw Error(ErrorKind::Type, "not a binary operator", pos);
  }
  e.args = {std::move(a), std::move(b)};
  return finish(std::move(e));
}

RExprPtr closure(const TypeHierarchy& h, RExprPtr r, Pos pos) {
  if (r->arity() != 2) type_error(h, "closure needs a binary relation", r, nullptr, pos);
  const TypeId c = h.lca(r->cols[0], r->cols[1]);
  if (c == kNoType) type_error(h, "closure needs a homogeneous relation", r, nullptr, pos);
  return finish(RExpr{RKind::Closure, -1, -1, "^", {c, c}, {std::move(r)}, pos});
}

RExprPtr call(int fun, std::string name, std::vector<RExprPtr> args, std::vector<TypeId> result,
              Pos pos) {
  return finish(RExpr{RKind::Call, fun, -1, std::move(name), std::move(result), std::move(args), pos});
}

RFormulaPtr truth(bool value, Pos pos) {
  RFormula f;
  f.kind = value ? FKind::True : FKind::False;
  f.pos = pos;
  return finish(std::move(f));
}

RFormulaPtr negate(RFormulaPtr g, Pos pos) {
  RFormula f;
  f.kind = FKind::Not;
  f.kids.push_back(std::move(g));
  f.pos = pos;
  return finish(std::move(f));
}

namespace {

RFormulaPtr nary(FKind kind, std::vector<RFormulaPtr> kids, Pos pos) {
  const FKind unit = kind == FKind::And ? FKind::True : FKind::False;
  RFormula f;
  f.kind = kind;
  f.pos = pos;
  for (auto& k : kids) {
    if (k->kind == unit) continue;
    if (k->kind == kind) {
      f.kids.insert(f.kids.end(), k->kids.begin(), k->kids.end());
    } else {
      f.kids.push_back(std::move(k));
    }
  }
  if (f.kids.empty()) return truth(kind == FKind::And, pos);
  if (f.kids.size() == 1) return f.kids[0];
  return finish(std::move(f));
}

}  // namespace

RFormulaPtr conj(std::vector<RFormulaPtr> kids, Pos pos) { return nary(FKind::And, std::move(kids), pos); }
RFormulaPtr disj(std::vector<RFormulaPtr> kids, Pos pos) { return nary(FKind::Or, std::move(kids), pos); }

RFormulaPtr implies(RFormulaPtr a, RFormulaPtr b, Pos pos) {
  RFormula f;
  f.kind = FKind::Implies;
  f.kids = {std::move(a), std::move(b)};
  f.pos = pos;
  return finish(std::move(f));
}

RFormulaPtr iff(RFormulaPtr a, RFormulaPtr b, Pos pos) {
  RFormula f;
  f.kind = FKind::Iff;
  f.kids = {std::move(a), std::move(b)};
  f.pos = pos;
  return finish(std::move(f));
}

namespace {

RFormulaPtr comparison(const TypeHierarchy& h, FKind kind, RExprPtr a, RExprPtr b, Pos pos) {
  if (a->arity() != b->arity()) type_error(h, "arity mismatch in comparison", a, b, pos);
  for (int i = 0; i < a->arity(); ++i) {
    if (h.top(a->cols[i]) != h.top(b->cols[i])) {
      type_error(h, "comparing incompatible column types", a, b, pos);
    }
  }
  RFormula f;
  f.kind = kind;
  f.a = std::move(a);
  f.b = std::move(b);
  f.pos = pos;
  return finish(std::move(f));
}

}  // namespace

RFormulaPtr subset(const TypeHierarchy& h, RExprPtr a, RExprPtr b, Pos pos) {
  return comparison(h, FKind::Subset, std::move(a), std::move(b), pos);
}

RFormulaPtr equal(const TypeHierarchy& h, RExprPtr a, RExprPtr b, Pos pos) {
  return comparison(h, FKind::Equal, std::move(a), std::move(b), pos);
}

RFormulaPtr mult(Quantifier q, RExprPtr e, Pos pos) {
  RFormula f;
  f.kind = FKind::Mult;
  f.quant = q;
  f.a = std::move(e);
  f.pos = pos;
  return finish(std::move(f));
}

RFormulaPtr quant(Quantifier q, int var, std::string name, RExprPtr bound, RFormulaPtr body,
                  Pos pos) {
  RFormula f;
  f.kind = FKind::Quant;
  f.quant = q;
  f.var = var;
  f.var_name = std::move(name);
  f.a = std::move(bound);
  f.kids.push_back(std::move(body));
  f.pos = pos;
  return finish(std::move(f));
}

RFormulaPtr call(int pred, std::string name, std::vector<RExprPtr> args, Pos pos) {
  RFormula f;
  f.kind = FKind::Call;
  f.id = pred;
  f.var_name = std::move(name);
  f.args = std::move(args);
  f.pos = pos;
  return finish(std::move(f));
}

}  // namespace ir

// ---- traversal ------------------------------------------------------------------------

RExprPtr substitute(const TypeHierarchy& h, const RExprPtr& e, const std::map<int, RExprPtr>& sub,
                    int& next_var) {
  switch (e->kind) {
    case RKind::Var: {
      const auto it = sub.find(e->id);
      return it == sub.end() ? e : it->second;
    }
    case RKind::Type:
    case RKind::Relation:
    case RKind::Atom:
    case RKind::Iden:
      return e;
    case RKind::Closure:
      return ir::closure(h, substitute(h, e->args[0], sub, next_var), e->pos);
    case RKind::Call: {
      std::vector<RExprPtr> args;
      for (const auto& a : e->args) args.push_back(substitute(h, a, sub, next_var));
      return ir::call(e->id, e->name, std::move(args), e->cols, e->pos);
    }
    default:
      return ir::binary(h, e->kind, substitute(h, e->args[0], sub, next_var),
                        substitute(h, e->args[1], sub, next_var), e->pos);
  }
}

RFormulaPtr substitute(const TypeHierarchy& h, const RFormulaPtr& f,
                       const std::map<int, RExprPtr>& sub, int& next_var) {
  auto kids = [&] {
    std::vector<RFormulaPtr> out;
    for (const auto& k : f->kids) out.push_back(substitute(h, k, sub, next_var));
    return out;
  };
  switch (f->kind) {
    case FKind::True:
    case FKind::False:
      return f;
    case FKind::Not:
      return ir::negate(substitute(h, f->kids[0], sub, next_var), f->pos);
    case FKind::And: {
      RFormula g = *f;
      g.kids = kids();
      return std::make_shared<const RFormula>(std::move(g));
    }
    case FKind::Or: {
      RFormula g = *f;
      g.kids = kids();
      return std::make_shared<const RFormula>(std::move(g));
    }
    case FKind::Implies: {
      auto k = kids();
      return ir::implies(k[0], k[1], f->pos);
    }
    case FKind::Iff: {
      auto k = kids();
      return ir::iff(k[0], k[1], f->pos);
    }
    case FKind::Subset:
      return ir::subset(h, substitute(h, f->a, sub, next_var), substitute(h, f->b, sub, next_var),
                        f->pos);
    case FKind::Equal:
      return ir::equal(h, substitute(h, f->a, sub, next_var), substitute(h, f->b, sub, next_var),
                       f->pos);
    case FKind::Mult:
      return ir::mult(f->quant, substitute(h, f->a, sub, next_var), f->pos);
    case FKind::Quant: {
      auto bound = substitute(h, f->a, sub, next_var);
      const int fresh = next_var++;
      auto inner = sub;
      inner[f->var] = ir::var(fresh, f->var_name, bound->cols, f->pos);
      return ir::quant(f->quant, fresh, f->var_name, bound,
                       substitute(h, f->kids[0], inner, next_var), f->pos);
    }
    case FKind::Call: {
      std::vector<RExprPtr> args;
      for (const auto& a : f->args) args.push_back(substitute(h, a, sub, next_var));
      return ir::call(f->id, f->var_name, std::move(args), f->pos);
    }
  }
  return f;
}

namespace {

bool any_expr(const RExprPtr& e, const std::function<bool(const RExpr&)>& pred) {
  if (pred(*e)) return true;
  for (const auto& a : e->args) {
    if (any_expr(a, pred)) return true;
  }
  return false;
}

bool any_in_formula(const RFormulaPtr& f, const std::function<bool(const RExpr&)>& pe,
                    const std::function<bool(const RFormula&)>& pf) {
  if (pf(*f)) return true;
  for (const auto* e : {&f->a, &f->b}) {
    if (*e && any_expr(*e, pe)) return true;
  }
  for (const auto& a : f->args) {
    if (any_expr(a, pe)) return true;
  }
  for (const auto& k : f->kids) {
    if (any_in_formula(k, pe, pf)) return true;
  }
  return false;
}

void collect_free(const RExprPtr& e, const std::set<int>& bound, std::vector<int>& out) {
  if (e->kind == RKind::Var && !bound.count(e->id) &&
      std::find(out.begin(), out.end(), e->id) == out.end()) {
    out.push_back(e->id);
  }
  for (const auto& a : e->args) collect_free(a, bound, out);
}

void collect_free(const RFormulaPtr& f, std::set<int>& bound, std::vector<int>& out) {
  for (const auto* e : {&f->a, &f->b}) {
    if (*e) collect_free(*e, bound, out);
  }
  for (const auto& a : f->args) collect_free(a, bound, out);
  if (f->kind == FKind::Quant) {
    const bool was = bound.count(f->var);
    bound.insert(f->var);
    collect_free(f->kids[0], bound, out);
    if (!was) bound.erase(f->var);
    return;
  }
  for (const auto& k : f->kids) collect_free(k, bound, out);
}

}  // namespace

bool contains_closure(const RExprPtr& e) {
  return any_expr(e, [](const RExpr& x) { return x.kind == RKind::Closure; });
}

bool contains_closure(const RFormulaPtr& f) {
  return any_in_formula(
      f, [](const RExpr& x) { return x.kind == RKind::Closure; },
      [](const RFormula&) { return false; });
}

bool contains_call(const RFormulaPtr& f) {
  return any_in_formula(
      f, [](const RExpr& x) { return x.kind == RKind::Call; },
      [](const RFormula& g) { return g.kind == FKind::Call; });
}

std::vector<int> free_vars(const RFormulaPtr& f) {
  std::set<int> bound;
  std::vector<int> out;
  collect_free(f, bound, out);
  return out;
}

// ---- rendering ------------------------------------------------------------------------

namespace {

void render(std::ostream& os, const RExpr& e) {
  switch (e.kind) {
    case RKind::Type:
    case RKind::Relation:
    case RKind::Var:
    case RKind::Atom:
    case RKind::Iden:
      os << e.name;
      return;
    case RKind::Closure:
      // Binary operands already print their own parentheses.
      os << '^';
      render(os, *e.args[0]);
      return;
    case RKind::Call:
      os << e.name << '[';
      for (std::size_t i = 0; i < e.args.size(); ++i) {
        if (i) os << ", ";
        render(os, *e.args[i]);
      }
      os << ']';
      return;
    default: {
      const char* op = e.kind == RKind::Union          ? " + "
                       : e.kind == RKind::Intersection ? " & "
                       : e.kind == RKind::Difference   ? " - "
                       : e.kind == RKind::Product      ? "->"
                                                       : ".";
      os << '(';
      render(os, *e.args[0]);
      os << op;
      render(os, *e.args[1]);
      os << ')';
    }
  }
}

void render(std::ostream& os, const RFormula& f) {
  switch (f.kind) {
    case FKind::True: os << "true"; return;
    case FKind::False: os << "false"; return;
    case FKind::Not:
      os << "not ";
      render(os, *f.kids[0]);
      return;
    case FKind::And:
    case FKind::Or:
      os << '(';
      for (std::size_t i = 0; i < f.kids.size(); ++i) {
        if (i) os << (f.kind == FKind::And ? " and " : " or ");
        render(os, *f.kids[i]);
      }
      os << ')';
      return;
    case FKind::Implies:
    case FKind::Iff:
      os << '(';
      render(os, *f.kids[0]);
      os << (f.kind == FKind::Implies ? " implies " : " iff ");
      render(os, *f.kids[1]);
      os << ')';
      return;
    case FKind::Subset:
    case FKind::Equal:
      render(os, *f.a);
      os << (f.kind == FKind::Subset ? " in " : " = ");
      render(os, *f.b);
      return;
    case FKind::Mult:
      os << to_string(f.quant) << ' ';
      render(os, *f.a);
      return;
    case FKind::Quant:
      os << '(' << to_string(f.quant) << ' ' << f.var_name << ": ";
      render(os, *f.a);
      os << " | ";
      render(os, *f.kids[0]);
      os << ')';
      return;
    case FKind::Call:
      os << f.var_name << '[';
      for (std::size_t i = 0; i < f.args.size(); ++i) {
        if (i) os << ", ";
        render(os, *f.args[i]);
      }
      os << ']';
      return;
  }
}

}  // namespace

std::string to_string(const RExpr& e) {
  std::ostringstream os;
  render(os, e);
  return os.str();
}

std::string to_string(const RFormula& f) {
  std::ostringstream os;
  render(os, f);
  return os.str();
}

}  // namespace alloysmt
