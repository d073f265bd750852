#include "alloysmt/sema.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "alloysmt/diagnostics.hpp"

namespace alloysmt {

std::optional<int> CheckedModel::find_relation(std::string_view name) const {
  for (int i = 0; i < static_cast<int>(relations.size()); ++i) {
    if (relations[i].name == name) return i;
  }
  return std::nullopt;
}

const NamedFormula* CheckedModel::find_assert(std::string_view name) const {
  for (const auto& a : asserts) {
    if (a.name == name) return &a;
  }
  return nullptr;
}

const CheckCmd* CheckedModel::find_check(std::string_view assertion) const {
  for (const auto& c : checks) {
    if (c.assertion == assertion) return &c;
  }
  return nullptr;
}

std::optional<int> CheckProblem::skolem_of_var(int var) const {
  for (int i = 0; i < static_cast<int>(skolems.size()); ++i) {
    if (skolems[i].var == var) return i;
  }
  return std::nullopt;
}

bool has_nonvalue(const CheckProblem& p, TypeId top) {
  for (const auto& r : p.relations) {
    if (r.multiplicity == Multiplicity::Lone && p.hierarchy.top(r.range()) == top) return true;
  }
  return false;
}

namespace {

class Resolver {
 public:
  explicit Resolver(CheckedModel& out) : m_(out) {}

  void run(const SourceModel& src) {
    m_.source_name = src.source_name;
    declare_types(src);
    declare_fields(src);
    declare_callables(src);
    for (const auto& p : src.paragraphs) std::visit([&](const auto& d) { define(d); }, p);
  }

 private:
  CheckedModel& m_;
  std::vector<std::pair<std::string, RExprPtr>> env_;
  std::map<std::string, int> pred_index_;
  std::map<std::string, int> fun_index_;

  const TypeHierarchy& h() const { return m_.hierarchy; }

  // ---- declarations -----------------------------------------------------------------

  void declare_types(const SourceModel& src) {
    std::set<std::string> names;
    for (const auto& s : src.sigs) {
      if (!names.insert(s.name).second) {
        throw Error(ErrorKind::Type, "duplicate signature '" + s.name + "'", s.pos);
      }
    }
    for (const auto& s : src.sigs) {
      if (s.kind != SigKind::TopLevel && !names.count(s.parent)) {
        throw Error(ErrorKind::Type, "unknown parent signature '" + s.parent + "'", s.pos);
      }
    }
    // Parents first; a pass that adds nothing means a cycle.
    std::vector<bool> added(src.sigs.size(), false);
    std::size_t remaining = src.sigs.size();
    while (remaining > 0) {
      bool progress = false;
      for (std::size_t i = 0; i < src.sigs.size(); ++i) {
        const auto& s = src.sigs[i];
        if (added[i]) continue;
        TypeId parent = kNoType;
        if (s.kind != SigKind::TopLevel) {
          const auto p = m_.hierarchy.find(s.parent);
          if (!p) continue;
          parent = *p;
        }
        m_.hierarchy.add(s.name, parent, s.kind, s.is_abstract, s.pos);
        added[i] = true;
        --remaining;
        progress = true;
      }
      if (!progress) {
        for (std::size_t i = 0; i < src.sigs.size(); ++i) {
          if (!added[i]) {
            throw Error(ErrorKind::Type, "cyclic signature hierarchy at '" + src.sigs[i].name + "'",
                        src.sigs[i].pos);
          }
        }
      }
    }
  }

  void declare_fields(const SourceModel& src) {
    for (const auto& s : src.sigs) {
      const TypeId owner = *m_.hierarchy.find(s.name);
      for (const auto& f : s.fields) {
        if (m_.find_relation(f.name) || m_.hierarchy.find(f.name)) {
          throw Error(ErrorKind::Type, "duplicate declaration of '" + f.name + "'", f.pos);
        }
        RelationSchema r;
        r.name = f.name;
        r.multiplicity = f.multiplicity;
        r.pos = f.pos;
        r.columns.push_back(owner);
        r.restriction.push_back(-1);
        for (std::size_t c = 0; c < f.columns.size(); ++c) {
          const auto& col = *f.columns[c];
          if (col.kind != ExprKind::Name) {
            throw Error(ErrorKind::OutOfScope, "compound field column expressions", col.pos);
          }
          if (const auto t = m_.hierarchy.find(col.name)) {
            r.columns.push_back(*t);
            r.restriction.push_back(-1);
            continue;
          }
          const auto rel = m_.find_relation(col.name);
          if (!rel) throw Error(ErrorKind::Type, "unbound name '" + col.name + "'", col.pos);
          const auto& restrict = m_.relations[*rel];
          if (restrict.arity() != 2 || restrict.columns[0] != owner) {
            throw Error(ErrorKind::OutOfScope,
                        "field columns restricted by anything but a binary field of the same "
                        "signature",
                        col.pos);
          }
          if (c + 1 == f.columns.size()) {
            throw Error(ErrorKind::OutOfScope, "restricted range columns", col.pos);
          }
          r.columns.push_back(restrict.range());
          r.restriction.push_back(*rel);
        }
        if (r.multiplicity == Multiplicity::One && r.restricted()) {
          throw Error(ErrorKind::OutOfScope, "'one' multiplicity on a restricted domain", f.pos);
        }
        m_.relations.push_back(std::move(r));
      }
    }
  }

  void declare_callables(const SourceModel& src) {
    for (const auto& p : src.paragraphs) {
      if (const auto* d = std::get_if<PredDecl>(&p)) {
        check_fresh_callable(d->name, d->pos);
        pred_index_[d->name] = static_cast<int>(m_.preds.size());
        m_.preds.push_back(PredDef{d->name, {}, nullptr, d->pos});
      } else if (const auto* d = std::get_if<FunDecl>(&p)) {
        check_fresh_callable(d->name, d->pos);
        fun_index_[d->name] = static_cast<int>(m_.funs.size());
        FunDef f;
        f.name = d->name;
        f.pos = d->pos;
        m_.funs.push_back(std::move(f));
      }
    }
    // Signatures are needed before any body refers to a callable's result type.
    for (const auto& p : src.paragraphs) {
      if (const auto* d = std::get_if<PredDecl>(&p)) {
        m_.preds[pred_index_[d->name]].params = params(d->params);
      } else if (const auto* d = std::get_if<FunDecl>(&p)) {
        auto& f = m_.funs[fun_index_[d->name]];
        f.params = params(d->params);
        env_.clear();
        for (const auto& v : f.params) env_.emplace_back(v.name, ir::var(v.id, v.name, v.bound->cols, v.pos));
        f.result = expr(*d->result_type)->cols;
        f.result_multiplicity = d->result_multiplicity;
        env_.clear();
      }
    }
  }

  void check_fresh_callable(const std::string& name, Pos pos) {
    if (pred_index_.count(name) || fun_index_.count(name) || m_.hierarchy.find(name) ||
        m_.find_relation(name)) {
      throw Error(ErrorKind::Type, "duplicate declaration of '" + name + "'", pos);
    }
  }

  std::vector<VarDecl> params(const std::vector<Param>& ps) {
    env_.clear();
    std::vector<VarDecl> out;
    std::set<std::string> seen;
    for (const auto& p : ps) {
      if (!seen.insert(p.name).second) {
        throw Error(ErrorKind::Type, "duplicate parameter '" + p.name + "'", p.pos);
      }
      auto bound = expr(*p.type);
      VarDecl v{m_.next_var++, p.name, bound, p.pos};
      env_.emplace_back(p.name, ir::var(v.id, v.name, bound->cols, p.pos));
      out.push_back(std::move(v));
    }
    env_.clear();
    return out;
  }

  void bind_params(const std::vector<VarDecl>& ps) {
    env_.clear();
    for (const auto& v : ps) env_.emplace_back(v.name, ir::var(v.id, v.name, v.bound->cols, v.pos));
  }

  // ---- paragraphs -------------------------------------------------------------------

  void define(const FactDecl& d) {
    env_.clear();
    for (const auto& f : d.body) {
      m_.facts.push_back(NamedFormula{d.name.empty() ? "fact" : d.name, formula(*f), f->pos});
    }
  }

  void define(const PredDecl& d) {
    auto& p = m_.preds[pred_index_[d.name]];
    bind_params(p.params);
    std::vector<RFormulaPtr> parts;
    for (const auto& f : d.body) parts.push_back(formula(*f));
    p.body = ir::conj(std::move(parts), d.pos);
    env_.clear();
  }

  void define(const FunDecl& d) {
    auto& f = m_.funs[fun_index_[d.name]];
    bind_params(f.params);
    f.body = expr(*d.body);
    env_.clear();
    if (f.body->arity() != static_cast<int>(f.result.size())) {
      throw Error(ErrorKind::Type, "body of '" + d.name + "' does not match its result arity",
                  d.body->pos);
    }
    for (std::size_t i = 0; i < f.result.size(); ++i) {
      if (h().top(f.body->cols[i]) != h().top(f.result[i])) {
        throw Error(ErrorKind::Type, "body of '" + d.name + "' does not match its result type",
                    d.body->pos);
      }
    }
  }

  void define(const AssertDecl& d) {
    if (m_.find_assert(d.name)) {
      throw Error(ErrorKind::Type, "duplicate assertion '" + d.name + "'", d.pos);
    }
    env_.clear();
    std::vector<RFormulaPtr> parts;
    for (const auto& f : d.body) parts.push_back(formula(*f));
    m_.asserts.push_back(NamedFormula{d.name, ir::conj(std::move(parts), d.pos), d.pos});
  }

  void define(const CheckCmd& c) { m_.checks.push_back(c); }

 public:
  void verify_checks() const {
    for (const auto& c : m_.checks) {
      if (!m_.find_assert(c.assertion)) {
        throw Error(ErrorKind::Type, "check of unknown assertion '" + c.assertion + "'", c.pos);
      }
    }
  }

 private:
  // ---- expressions ------------------------------------------------------------------

  RExprPtr lookup_name(const std::string& name, Pos pos) {
    for (auto it = env_.rbegin(); it != env_.rend(); ++it) {
      if (it->first == name) {
        const auto& v = it->second;
        return ir::var(v->id, v->name, v->cols, pos);
      }
    }
    if (const auto t = m_.hierarchy.find(name)) return ir::type(m_.hierarchy, *t, pos);
    if (const auto r = m_.find_relation(name)) return ir::relation(m_.relations, *r, pos);
    if (const auto f = fun_index_.find(name); f != fun_index_.end()) {
      return fun_call(f->second, {}, pos);
    }
    if (pred_index_.count(name)) {
      throw Error(ErrorKind::Type, "predicate '" + name + "' used as an expression", pos);
    }
    throw Error(ErrorKind::Type, "unbound name '" + name + "'", pos);
  }

  RExprPtr fun_call(int index, std::vector<RExprPtr> args, Pos pos) {
    const auto& f = m_.funs[index];
    check_args(f.name, f.params, args, pos);
    return ir::call(index, f.name, std::move(args), f.result, pos);
  }

  void check_args(const std::string& name, const std::vector<VarDecl>& params,
                  const std::vector<RExprPtr>& args, Pos pos) const {
    if (params.size() != args.size()) {
      throw Error(ErrorKind::Type,
                  "'" + name + "' expects " + std::to_string(params.size()) + " arguments, got " +
                      std::to_string(args.size()),
                  pos);
    }
    for (std::size_t i = 0; i < args.size(); ++i) {
      const auto& want = params[i].bound->cols;
      const auto& got = args[i]->cols;
      if (want.size() != got.size()) {
        throw Error(ErrorKind::Type, "argument " + std::to_string(i + 1) + " of '" + name +
                                         "' has arity " + std::to_string(got.size()) +
                                         ", expected " + std::to_string(want.size()),
                    args[i]->pos);
      }
      for (std::size_t c = 0; c < want.size(); ++c) {
        if (h().disjoint(want[c], got[c])) {
          throw Error(ErrorKind::Type,
                      "argument " + std::to_string(i + 1) + " of '" + name + "' has type " +
                          h().name(got[c]) + ", expected " + h().name(want[c]),
                      args[i]->pos);
        }
      }
    }
  }

  RExprPtr expr(const Expr& e) {
    switch (e.kind) {
      case ExprKind::Name:
        return lookup_name(e.name, e.pos);
      case ExprKind::Union:
      case ExprKind::Intersection:
      case ExprKind::Difference:
      case ExprKind::Join:
      case ExprKind::Product: {
        static const std::map<ExprKind, RKind> kinds = {
            {ExprKind::Union, RKind::Union},   {ExprKind::Intersection, RKind::Intersection},
            {ExprKind::Difference, RKind::Difference}, {ExprKind::Join, RKind::Join},
            {ExprKind::Product, RKind::Product}};
        return ir::binary(h(), kinds.at(e.kind), expr(*e.args[0]), expr(*e.args[1]), e.pos);
      }
      case ExprKind::Closure:
        return ir::closure(h(), expr(*e.args[0]), e.pos);
      case ExprKind::ReflexiveClosure: {
        auto c = ir::closure(h(), expr(*e.args[0]), e.pos);
        return ir::binary(h(), RKind::Union, c, ir::iden(c->cols[0], e.pos), e.pos);
      }
      case ExprKind::Call: {
        std::vector<RExprPtr> args;
        for (const auto& a : e.args) args.push_back(expr(*a));
        if (const auto f = fun_index_.find(e.name); f != fun_index_.end()) {
          return fun_call(f->second, std::move(args), e.pos);
        }
        if (pred_index_.count(e.name)) {
          throw Error(ErrorKind::Type, "predicate '" + e.name + "' used as an expression", e.pos);
        }
        // Box join: r[a, b] is b.(a.r).
        RExprPtr acc = lookup_name(e.name, e.pos);
        for (const auto& a : args) acc = ir::binary(h(), RKind::Join, a, acc, e.pos);
        return acc;
      }
    }
    throw Error(ErrorKind::Type, "unsupported expression", e.pos);
  }

  // ---- formulas ---------------------------------------------------------------------

  RFormulaPtr formula(const Formula& f) {
    switch (f.kind) {
      case FormulaKind::True:
      case FormulaKind::False:
        return ir::truth(f.kind == FormulaKind::True, f.pos);
      case FormulaKind::Compare: {
        auto a = expr(*f.lhs);
        auto b = expr(*f.rhs);
        switch (f.op) {
          case CompareOp::Equal: return ir::equal(h(), a, b, f.pos);
          case CompareOp::NotEqual: return ir::negate(ir::equal(h(), a, b, f.pos), f.pos);
          case CompareOp::In: return ir::subset(h(), a, b, f.pos);
          case CompareOp::Colon: {
            auto in = ir::subset(h(), a, b, f.pos);
            if (b->arity() != 1) return in;
            return ir::conj({in, ir::mult(Quantifier::One, a, f.pos)}, f.pos);
          }
        }
        break;
      }
      case FormulaKind::Not:
        return ir::negate(formula(*f.kids[0]), f.pos);
      case FormulaKind::And:
        return ir::conj({formula(*f.kids[0]), formula(*f.kids[1])}, f.pos);
      case FormulaKind::Or:
        return ir::disj({formula(*f.kids[0]), formula(*f.kids[1])}, f.pos);
      case FormulaKind::Implies:
        return ir::implies(formula(*f.kids[0]), formula(*f.kids[1]), f.pos);
      case FormulaKind::Iff:
        return ir::iff(formula(*f.kids[0]), formula(*f.kids[1]), f.pos);
      case FormulaKind::Quantified: {
        auto bound = expr(*f.lhs);
        if (bound->arity() != 1) {
          throw Error(ErrorKind::OutOfScope, "quantification over non-unary bounds", f.lhs->pos);
        }
        const int id = m_.next_var++;
        env_.emplace_back(f.name, ir::var(id, f.name, bound->cols, f.pos));
        auto body = formula(*f.kids[0]);
        env_.pop_back();
        return ir::quant(f.quant, id, f.name, bound, body, f.pos);
      }
      case FormulaKind::Cardinality:
        return ir::mult(f.quant, expr(*f.lhs), f.pos);
      case FormulaKind::PredCall: {
        const auto p = pred_index_.find(f.name);
        if (p == pred_index_.end()) {
          if (fun_index_.count(f.name)) {
            throw Error(ErrorKind::Type, "function '" + f.name + "' used as a formula", f.pos);
          }
          throw Error(ErrorKind::Type, "unknown predicate '" + f.name + "'", f.pos);
        }
        std::vector<RExprPtr> args;
        for (const auto& a : f.args) args.push_back(expr(*a));
        check_args(f.name, m_.preds[p->second].params, args, f.pos);
        return ir::call(p->second, f.name, std::move(args), f.pos);
      }
    }
    throw Error(ErrorKind::Type, "unsupported formula", f.pos);
  }
};

// ---- inlining -------------------------------------------------------------------------

class Inliner {
 public:
  Inliner(const CheckedModel& m, int& next_var) : m_(m), next_var_(next_var) {}

  RExprPtr expr(const RExprPtr& e) {
    const auto& h = m_.hierarchy;
    switch (e->kind) {
      case RKind::Type:
      case RKind::Relation:
      case RKind::Var:
      case RKind::Atom:
      case RKind::Iden:
        return e;
      case RKind::Closure:
        return ir::closure(h, expr(e->args[0]), e->pos);
      case RKind::Call: {
        const auto& f = m_.funs.at(e->id);
        enter("function", f.name, e->id + kFunOffset, e->pos);
        std::map<int, RExprPtr> sub;
        for (std::size_t i = 0; i < f.params.size(); ++i) sub[f.params[i].id] = expr(e->args[i]);
        auto body = expr(substitute(h, f.body, sub, next_var_));
        leave();
        return body;
      }
      default:
        return ir::binary(h, e->kind, expr(e->args[0]), expr(e->args[1]), e->pos);
    }
  }

  RFormulaPtr formula(const RFormulaPtr& f) {
    const auto& h = m_.hierarchy;
    auto kids = [&] {
      std::vector<RFormulaPtr> out;
      for (const auto& k : f->kids) out.push_back(formula(k));
      return out;
    };
    switch (f->kind) {
      case FKind::True:
      case FKind::False:
        return f;
      case FKind::Not:
        return ir::negate(formula(f->kids[0]), f->pos);
      case FKind::And:
        return ir::conj(kids(), f->pos);
      case FKind::Or:
        return ir::disj(kids(), f->pos);
      case FKind::Implies: {
        auto k = kids();
        return ir::implies(k[0], k[1], f->pos);
      }
      case FKind::Iff: {
        auto k = kids();
        return ir::iff(k[0], k[1], f->pos);
      }
      case FKind::Subset:
        return ir::subset(h, expr(f->a), expr(f->b), f->pos);
      case FKind::Equal:
        return ir::equal(h, expr(f->a), expr(f->b), f->pos);
      case FKind::Mult:
        return ir::mult(f->quant, expr(f->a), f->pos);
      case FKind::Quant:
        return ir::quant(f->quant, f->var, f->var_name, expr(f->a), formula(f->kids[0]), f->pos);
      case FKind::Call: {
        const auto& p = m_.preds.at(f->id);
        enter("predicate", p.name, f->id, f->pos);
        std::map<int, RExprPtr> sub;
        for (std::size_t i = 0; i < p.params.size(); ++i) sub[p.params[i].id] = expr(f->args[i]);
        auto body = formula(substitute(h, p.body, sub, next_var_));
        leave();
        return body;
      }
    }
    return f;
  }

 private:
  static constexpr int kFunOffset = 1 << 20;
  const CheckedModel& m_;
  int& next_var_;
  std::vector<int> stack_;

  void enter(const char* what, const std::string& name, int key, Pos pos) {
    if (std::find(stack_.begin(), stack_.end(), key) != stack_.end()) {
      throw Error(ErrorKind::Type, std::string("recursive ") + what + " '" + name + "' is not supported",
                  pos);
    }
    stack_.push_back(key);
  }
  void leave() { stack_.pop_back(); }
};

// ---- normal form ----------------------------------------------------------------------

class Nnf {
 public:
  Nnf(const TypeHierarchy& h, int& next_var) : h_(h), next_var_(next_var) {}

  RFormulaPtr run(const RFormulaPtr& f, bool positive) {
    switch (f->kind) {
      case FKind::True:
      case FKind::False:
        return ir::truth((f->kind == FKind::True) == positive, f->pos);
      case FKind::Not:
        return run(f->kids[0], !positive);
      case FKind::And:
      case FKind::Or: {
        std::vector<RFormulaPtr> kids;
        for (const auto& k : f->kids) kids.push_back(run(k, positive));
        const bool is_and = (f->kind == FKind::And) == positive;
        return is_and ? ir::conj(std::move(kids), f->pos) : ir::disj(std::move(kids), f->pos);
      }
      case FKind::Implies: {
        const auto& a = f->kids[0];
        const auto& b = f->kids[1];
        if (positive) return ir::disj({run(a, false), run(b, true)}, f->pos);
        return ir::conj({run(a, true), run(b, false)}, f->pos);
      }
      case FKind::Iff: {
        const auto& a = f->kids[0];
        const auto& b = f->kids[1];
        if (positive) {
          return ir::conj({ir::disj({run(a, false), run(b, true)}, f->pos),
                           ir::disj({run(a, true), run(b, false)}, f->pos)},
                          f->pos);
        }
        return ir::disj({ir::conj({run(a, true), run(b, false)}, f->pos),
                         ir::conj({run(a, false), run(b, true)}, f->pos)},
                        f->pos);
      }
      case FKind::Mult:
        if (!positive && f->quant == Quantifier::No) return ir::mult(Quantifier::Some, f->a, f->pos);
        if (!positive && f->quant == Quantifier::Some) return ir::mult(Quantifier::No, f->a, f->pos);
        return positive ? f : ir::negate(f, f->pos);
      case FKind::Subset:
      case FKind::Equal:
      case FKind::Call:
        return positive ? f : ir::negate(f, f->pos);
      case FKind::Quant:
        return quant(f, positive);
    }
    return f;
  }

 private:
  const TypeHierarchy& h_;
  int& next_var_;

  RFormulaPtr quant(const RFormulaPtr& f, bool positive) {
    const auto& body = f->kids[0];
    switch (f->quant) {
      case Quantifier::All:
      case Quantifier::Some: {
        const bool is_all = (f->quant == Quantifier::All) == positive;
        return ir::quant(is_all ? Quantifier::All : Quantifier::Some, f->var, f->var_name, f->a,
                         run(body, positive), f->pos);
      }
      case Quantifier::No:
        // no x | F  ==  all x | not F
        return ir::quant(positive ? Quantifier::All : Quantifier::Some, f->var, f->var_name, f->a,
                         run(body, !positive), f->pos);
      case Quantifier::Lone:
        return run(lone(f), positive);
      case Quantifier::One: {
        auto some = ir::quant(Quantifier::Some, f->var, f->var_name, f->a, body, f->pos);
        return run(ir::conj({some, lone(f)}, f->pos), positive);
      }
    }
    return f;
  }

  // lone x: e | F  ==  all x: e | all y: e | F and F[y/x] implies x = y
  RFormulaPtr lone(const RFormulaPtr& f) {
    const int x = next_var_++;
    const int y = next_var_++;
    const std::string yname = f->var_name + "'";
    auto xv = ir::var(x, f->var_name, f->a->cols, f->pos);
    auto yv = ir::var(y, yname, f->a->cols, f->pos);
    auto fx = substitute(h_, f->kids[0], {{f->var, xv}}, next_var_);
    auto fy = substitute(h_, f->kids[0], {{f->var, yv}}, next_var_);
    auto inner = ir::implies(ir::conj({fx, fy}, f->pos), ir::equal(h_, xv, yv, f->pos), f->pos);
    return ir::quant(Quantifier::All, x, f->var_name, f->a,
                     ir::quant(Quantifier::All, y, yname, f->a, inner, f->pos), f->pos);
  }
};

bool has_existential(const RFormulaPtr& f) {
  if (f->kind == FKind::Quant && f->quant == Quantifier::Some) return true;
  return std::any_of(f->kids.begin(), f->kids.end(), has_existential);
}

void check_no_alternation(const RFormulaPtr& f) {
  if (f->kind == FKind::Quant && f->quant == Quantifier::All && has_existential(f->kids[0])) {
    throw Error(ErrorKind::OutOfScope, "quantifier alternation unsupported", f->pos);
  }
  for (const auto& k : f->kids) check_no_alternation(k);
}

}  // namespace

CheckedModel resolve_and_check(const SourceModel& model) {
  CheckedModel out;
  Resolver r(out);
  r.run(model);
  r.verify_checks();
  return out;
}

RFormulaPtr inline_invocations(const CheckedModel& model, const RFormulaPtr& f, int& next_var) {
  return Inliner(model, next_var).formula(f);
}

RExprPtr inline_invocations(const CheckedModel& model, const RExprPtr& e, int& next_var) {
  return Inliner(model, next_var).expr(e);
}

RFormulaPtr to_nnf(const TypeHierarchy& h, const RFormulaPtr& f, int& next_var) {
  return Nnf(h, next_var).run(f, true);
}

RFormulaPtr build_goal(const TypeHierarchy& h, const RFormulaPtr& assertion, int& next_var) {
  return Nnf(h, next_var).run(assertion, false);
}

Skolemized skolemize(const TypeHierarchy& h, const RFormulaPtr& goal) {
  Skolemized out;
  std::set<std::string> used;
  std::vector<RFormulaPtr> conjuncts;

  auto fresh_name = [&](const std::string& base) {
    std::string name = base;
    for (int k = 1; used.count(name); ++k) name = base + "_" + std::to_string(k);
    used.insert(name);
    return name;
  };

  std::vector<RFormulaPtr> work{goal};
  while (!work.empty()) {
    auto f = work.front();
    work.erase(work.begin());
    if (f->kind == FKind::And) {
      work.insert(work.begin(), f->kids.begin(), f->kids.end());
      continue;
    }
    if (f->kind == FKind::Quant && f->quant == Quantifier::Some) {
      SkolemConst k;
      k.name = fresh_name(f->var_name);
      k.type = f->a->cols[0];
      k.var = f->var;
      out.skolems.push_back(k);
      if (f->a->kind != RKind::Type) {
        auto v = ir::var(f->var, k.name, f->a->cols, f->pos);
        conjuncts.push_back(ir::subset(h, v, f->a, f->pos));
      }
      work.insert(work.begin(), f->kids[0]);
      continue;
    }
    check_no_alternation(f);
    conjuncts.push_back(f);
  }
  out.goal = ir::conj(std::move(conjuncts), goal->pos);
  return out;
}

CheckProblem build_problem(const CheckedModel& model, std::string_view assertion) {
  const auto* a = model.find_assert(assertion);
  if (!a) throw Error(ErrorKind::Usage, "no assertion named '" + std::string(assertion) + "'");
  CheckProblem p;
  p.source_name = model.source_name;
  p.assertion = a->name;
  p.assertion_pos = a->pos;
  p.hierarchy = model.hierarchy;
  p.relations = model.relations;
  p.next_var = model.next_var;
  if (const auto* c = model.find_check(assertion)) p.scope = c->scope;

  for (const auto& f : model.facts) {
    auto inlined = inline_invocations(model, f.formula, p.next_var);
    p.facts.push_back(NamedFormula{f.name, to_nnf(p.hierarchy, inlined, p.next_var), f.pos});
  }
  auto inlined = inline_invocations(model, a->formula, p.next_var);
  auto goal = build_goal(p.hierarchy, inlined, p.next_var);
  auto sk = skolemize(p.hierarchy, goal);
  p.skolems = std::move(sk.skolems);
  p.goal = std::move(sk.goal);
  for (auto& k : p.skolems) k.excludes_nonvalue = has_nonvalue(p, p.hierarchy.top(k.type));
  return p;
}

}  // namespace alloysmt
