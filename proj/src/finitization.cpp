#include "alloysmt/finitization.hpp"

#include <functional>
#include <sstream>

#include "alloysmt/diagnostics.hpp"

namespace alloysmt {

std::string_view to_string(BoundReason r) {
  switch (r) {
    case BoundReason::ClosureOperand:
      return "closure operand";
    case BoundReason::InlinedUniversal:
      return "inlined universal";
    case BoundReason::UserForced:
      return "user forced";
  }
  return "?";
}

std::optional<int> ScopePlan::bound(TypeId t) const {
  const auto it = bounds.find(t);
  if (it == bounds.end()) return std::nullopt;
  return it->second.atoms;
}

TypeId ScopePlan::cover(const TypeHierarchy& h, TypeId t) const {
  for (TypeId c = t; c != kNoType; c = h.info(c).parent) {
    if (bounds.count(c)) return c;
  }
  return kNoType;
}

std::string ScopePlan::summary(const TypeHierarchy& h) const {
  if (bounds.empty()) return "0 types finitized";
  std::ostringstream os;
  os << bounds.size() << (bounds.size() == 1 ? " type" : " types") << " finitized";
  for (const auto& [t, b] : bounds) {
    os << "\n  " << h.name(t) << ": " << b.atoms << " atoms (" << to_string(b.reason);
    if (!b.detail.empty()) os << ", " << b.detail;
    os << ")";
  }
  for (const auto& c : closures) {
    os << "\n  " << c.text << ": unrolled to depth " << c.depth;
  }
  return os.str();
}

namespace {

void for_each_expr(const RExprPtr& e, const std::function<void(const RExprPtr&)>& fn) {
  fn(e);
  for (const auto& a : e->args) for_each_expr(a, fn);
}

void for_each_formula(const RFormulaPtr& f, const std::function<void(const RFormulaPtr&)>& fn) {
  fn(f);
  for (const auto& k : f->kids) for_each_formula(k, fn);
}

void for_each_expr(const RFormulaPtr& f, const std::function<void(const RExprPtr&)>& fn) {
  for_each_formula(f, [&](const RFormulaPtr& g) {
    for (const auto* e : {&g->a, &g->b}) {
      if (*e) for_each_expr(*e, fn);
    }
    for (const auto& a : g->args) for_each_expr(a, fn);
  });
}

class Planner {
 public:
  Planner(const CheckProblem& p, const UserBounds& user) : p_(p), h_(p.hierarchy), user_(user) {}

  ScopePlan run() {
    for (const auto& [name, n] : user_.types) {
      const auto t = h_.find(name);
      if (!t) throw Error(ErrorKind::Usage, "bound names unknown type '" + name + "'");
      if (n < 1) throw Error(ErrorKind::Usage, "bound for '" + name + "' must be at least 1");
      plan_.bounds[*t] = TypeBound{n, BoundReason::UserForced, ""};
    }
    if (user_.scope && *user_.scope < 1) throw Error(ErrorKind::Usage, "scope must be at least 1");

    std::vector<RFormulaPtr> roots;
    for (const auto& f : p_.facts) roots.push_back(f.formula);
    roots.push_back(p_.goal);

    for (const auto& f : roots) {
      for_each_expr(f, [&](const RExprPtr& e) {
        if (e->kind != RKind::Closure) return;
        const RExprPtr& op = e->args[0];
        const std::string text = to_string(*e);
        require(op->cols[0], BoundReason::ClosureOperand, "domain of " + text, e->pos);
        // The unrolled closure is a function of the operand's relations, so their
        // domain columns are finitized alongside the closure type.
        for_each_expr(op, [&](const RExprPtr& x) {
          if (x->kind != RKind::Relation) return;
          const auto& schema = p_.relations[static_cast<std::size_t>(x->id)];
          for (int c = 0; c + 1 < schema.arity(); ++c) {
            require(schema.columns[static_cast<std::size_t>(c)], BoundReason::ClosureOperand,
                    "column of " + schema.name + " in " + text, e->pos);
          }
        });
      });
    }
    for (const auto& f : roots) {
      for_each_formula(f, [&](const RFormulaPtr& g) {
        if (g->kind != FKind::Quant || g->quant != Quantifier::All) return;
        if (!contains_closure(g->kids[0])) return;
        require(g->a->cols[0], BoundReason::InlinedUniversal,
                "universal over " + g->var_name + " encloses a closure", g->pos);
      });
    }
    for (const auto& f : roots) {
      for_each_expr(f, [&](const RExprPtr& e) {
        if (e->kind != RKind::Closure) return;
        const TypeId d = e->args[0]->cols[0];
        plan_.closures.push_back(ClosureSite{to_string(*e), d, required_tc_depth(h_, plan_, *e), e->pos});
      });
    }
    return plan_;
  }

 private:
  void require(TypeId t, BoundReason reason, const std::string& why, Pos pos) {
    if (plan_.bounds.count(t)) return;
    if (user_.scope) {
      plan_.bounds[t] = TypeBound{*user_.scope, reason, why};
      return;
    }
    const TypeId c = plan_.cover(h_, t);
    if (c != kNoType) {
      plan_.bounds[t] = TypeBound{plan_.bounds.at(c).atoms, reason,
                                  why + "; bound inherited from " + h_.name(c)};
      return;
    }
    const std::string& name = h_.name(t);
    throw Error(ErrorKind::Scope,
                "type " + name + " must be finitized (" + why + "); pass --bound " + name +
                    "=n or --scope n",
                pos);
  }

  const CheckProblem& p_;
  const TypeHierarchy& h_;
  const UserBounds& user_;
  ScopePlan plan_;
};

}  // namespace

ScopePlan plan_scopes(const CheckProblem& p, const UserBounds& user) { return Planner(p, user).run(); }

int required_tc_depth(const TypeHierarchy& h, const ScopePlan& plan, const RExpr& closure) {
  const TypeId d = closure.args.at(0)->cols.at(0);
  const TypeId c = plan.cover(h, d);
  if (c == kNoType) {
    throw Error(ErrorKind::Scope,
                "closure " + to_string(closure) + " over unbounded type " + h.name(d), closure.pos);
  }
  return plan.bounds.at(c).atoms;
}

bool constants_inside(const CheckProblem& p, const RExpr& range, TypeId cover) {
  const auto& h = p.hierarchy;
  return range.kind == RKind::Type && range.id == cover && h.is_top(cover) && !has_nonvalue(p, cover);
}

namespace {

/// Instances of a bounded universal, each paired with the membership guard it needs.
struct Instantiation {
  RFormulaPtr guard;  // null when the constant is always inside the range
  RFormulaPtr body;
};

std::optional<std::vector<Instantiation>> instances(const CheckProblem& p, const RFormula& q,
                                               const ScopePlan& plan) {
  const auto& h = p.hierarchy;
  if (q.kind != FKind::Quant || q.quant != Quantifier::All || q.a->arity() != 1) return std::nullopt;
  const TypeId c = plan.cover(h, q.a->cols[0]);
  if (c == kNoType) return std::nullopt;
  const bool inside = constants_inside(p, *q.a, c);
  std::vector<Instantiation> out;
  int next_var = p.next_var;
  const int n = plan.bounds.at(c).atoms;
  for (int i = 0; i < n; ++i) {
    const auto atom = ir::atom(h, c, i, q.pos);
    Instantiation inst;
    inst.body = substitute(h, q.kids[0], {{q.var, atom}}, next_var);
    if (!inside) inst.guard = ir::subset(h, atom, q.a, q.pos);
    out.push_back(std::move(inst));
  }
  return out;
}

void inline_into(const CheckProblem& p, const RFormulaPtr& f, const ScopePlan& plan,
                 std::vector<RFormulaPtr>& out) {
  if (f->kind == FKind::And) {
    for (const auto& k : f->kids) inline_into(p, k, plan, out);
    return;
  }
  const auto insts = instances(p, *f, plan);
  if (!insts) {
    out.push_back(f);
    return;
  }
  for (const auto& inst : *insts) {
    std::vector<RFormulaPtr> parts;
    inline_into(p, inst.body, plan, parts);
    for (auto& part : parts) {
      out.push_back(inst.guard ? ir::disj({ir::negate(inst.guard, f->pos), part}, f->pos) : part);
    }
  }
}

}  // namespace

std::vector<RFormulaPtr> inline_universals(const CheckProblem& p, const RFormulaPtr& f,
                                           const ScopePlan& plan) {
  std::vector<RFormulaPtr> out;
  inline_into(p, f, plan, out);
  return out;
}

RFormulaPtr expand_universals(const CheckProblem& p, const RFormulaPtr& f, const ScopePlan& plan) {
  if (const auto insts = instances(p, *f, plan)) {
    std::vector<RFormulaPtr> parts;
    for (const auto& inst : *insts) {
      auto body = expand_universals(p, inst.body, plan);
      parts.push_back(inst.guard ? ir::disj({ir::negate(inst.guard, f->pos), body}, f->pos) : body);
    }
    return ir::conj(std::move(parts), f->pos);
  }
  if (f->kids.empty()) return f;
  bool changed = false;
  std::vector<RFormulaPtr> kids;
  for (const auto& k : f->kids) {
    kids.push_back(expand_universals(p, k, plan));
    changed = changed || kids.back() != k;
  }
  if (!changed) return f;
  RFormula g = *f;
  g.kids = std::move(kids);
  return std::make_shared<const RFormula>(std::move(g));
}

}  // namespace alloysmt
