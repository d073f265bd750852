#include "alloysmt/translate.hpp"

#include <algorithm>
#include <filesystem>
#include <functional>
#include <sstream>

#include "alloysmt/diagnostics.hpp"

namespace alloysmt {

using smt::Term;

namespace {

const char* const kBuiltins[] = {"Bool", "true",  "false", "not",    "and",    "or",      "xor",
                                 "=>",   "=",     "distinct", "ite", "_",      "!",       "as",
                                 "let",  "exists", "forall", "match", "par",  "assert",  "model"};

std::string claim(std::set<std::string>& used, const std::string& want) {
  std::string base = want.empty() ? std::string("s") : want;
  if (!used.count(base)) {
    used.insert(base);
    return base;
  }
  for (int k = 1;; ++k) {
    std::string candidate = base + "$" + std::to_string(k);
    if (!used.count(candidate)) {
      used.insert(candidate);
      return candidate;
    }
  }
}

std::string capitalized(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

std::string src(Pos pos) { return pos.line > 0 ? "src:" + std::to_string(pos.line) : std::string(); }

void collect_vars(const RExprPtr& e, std::vector<int>& out) {
  if (e->kind == RKind::Var && std::find(out.begin(), out.end(), e->id) == out.end()) out.push_back(e->id);
  for (const auto& a : e->args) collect_vars(a, out);
}

/// Unary factors of a product chain, left to right.
void product_factors(const RExprPtr& e, std::vector<RExprPtr>& out) {
  if (e->kind == RKind::Product) {
    product_factors(e->args[0], out);
    product_factors(e->args[1], out);
    return;
  }
  out.push_back(e);
}

}  // namespace

struct FormulaTranslator::Impl {
  struct Binding {
    int var;
    Term term;
    std::string sort;
    bool local;  // an SMT bound variable rather than a constant
  };

  /// A relation with its leading columns fixed by scalars: `s2.(s1.r)` has prefix s1, s2.
  struct Image {
    int rel = -1;
    std::vector<Term> prefix;
  };

  const CheckProblem& p;
  const TypeHierarchy& h;
  Translation& t;
  std::vector<Binding> env;
  std::vector<smt::Command> defs;

  Impl(const CheckProblem& problem, Translation& tr) : p(problem), h(problem.hierarchy), t(tr) {}

  std::string fresh(const std::string& base) { return claim(t.symbols, base); }

  const std::string& sort(TypeId type) const { return t.types[static_cast<std::size_t>(h.top(type))].sort; }

  std::optional<Term> nonvalue(TypeId type) const {
    const auto it = t.nonvalues.find(h.top(type));
    if (it == t.nonvalues.end()) return std::nullopt;
    return smt::sym(it->second);
  }

  TypeId cover(TypeId type) const { return t.plan.cover(h, type); }

  std::vector<Term> constants(TypeId bounded) const {
    std::vector<Term> out;
    for (const auto& c : t.types[static_cast<std::size_t>(bounded)].constants) out.push_back(smt::sym(c));
    return out;
  }

  // ---- membership ----------------------------------------------------------------

  Term type_mem(TypeId type, const Term& x) const {
    if (h.is_top(type)) {
      const auto no = nonvalue(type);
      return no ? smt::mk_not(smt::mk_eq(x, *no)) : smt::mk_true();
    }
    return smt::app(t.types[static_cast<std::size_t>(type)].membership, {x});
  }

  const RelationSchema& schema(int rel) const { return p.relations[static_cast<std::size_t>(rel)]; }
  const RelationEncoding& encoding(int rel) const { return t.relations[static_cast<std::size_t>(rel)]; }

  /// Column typing and domain restrictions of a domain tuple.
  Term dom(int rel, const std::vector<Term>& ds) {
    const auto& s = schema(rel);
    std::vector<Term> parts;
    for (std::size_t i = 0; i + 1 < s.columns.size(); ++i) {
      parts.push_back(type_mem(s.columns[i], ds[i]));
      const int r = s.restriction[i];
      if (r >= 0) parts.push_back(rel_mem(r, {ds[0], ds[i]}));
    }
    return smt::mk_and(std::move(parts));
  }

  Term apply_fn(int rel, const std::vector<Term>& ds) const { return smt::app(encoding(rel).symbol, ds); }

  Term rel_mem(int rel, const std::vector<Term>& ts) {
    const auto& enc = encoding(rel);
    if (enc.style == EncodingStyle::BooleanColumn) return smt::app(enc.symbol, ts);
    const std::vector<Term> ds(ts.begin(), ts.end() - 1);
    const Term value = apply_fn(rel, ds);
    if (enc.nonvalue) {
      return smt::mk_and({smt::mk_eq(value, ts.back()), smt::mk_not(smt::mk_eq(ts.back(), smt::sym(*enc.nonvalue)))});
    }
    return smt::mk_and({dom(rel, ds), smt::mk_eq(value, ts.back())});
  }

  const Binding& lookup(int var) const {
    for (auto it = env.rbegin(); it != env.rend(); ++it) {
      if (it->var == var) return *it;
    }
    throw Error(ErrorKind::Translation, "free variable v" + std::to_string(var) + " has no binding");
  }

  std::optional<Term> scalar(const RExpr& e) const {
    if (e.kind == RKind::Var) return lookup(e.id).term;
    if (e.kind == RKind::Atom) {
      const auto& cs = t.types[static_cast<std::size_t>(e.id)].constants;
      if (e.index < 0 || static_cast<std::size_t>(e.index) >= cs.size())
        throw Error(ErrorKind::Translation, "constant " + e.name + " of an unbounded type", e.pos);
      return smt::sym(cs[static_cast<std::size_t>(e.index)]);
    }
    return std::nullopt;
  }

  /// The more specific of two column types, used for join witnesses.
  TypeId meet(TypeId a, TypeId b) const {
    if (h.is_subtype(a, b)) return a;
    if (h.is_subtype(b, a)) return b;
    const TypeId l = h.lca(a, b);
    return l == kNoType ? a : l;
  }

  Term exists_over(TypeId col, const std::function<Term(const Term&)>& body) {
    const TypeId c = cover(col);
    if (c != kNoType) {
      std::vector<Term> parts;
      for (const auto& k : constants(c)) parts.push_back(body(k));
      return smt::mk_or(std::move(parts));
    }
    const std::string x = fresh("x");
    return smt::mk_exists({{x, sort(col)}}, body(smt::sym(x)));
  }

  Term forall_over(TypeId col, const std::function<Term(const Term&)>& body) {
    const TypeId c = cover(col);
    if (c != kNoType) {
      std::vector<Term> parts;
      for (const auto& k : constants(c)) parts.push_back(body(k));
      return smt::mk_and(std::move(parts));
    }
    const std::string x = fresh("x");
    return smt::mk_forall({{x, sort(col)}}, body(smt::sym(x)));
  }

  /// Quantifies every column. Bounded columns range over their constants, others over
  /// the whole sort; bodies must be false (or vacuous) for ill-typed tuples.
  Term forall_cols(const std::vector<TypeId>& cols, const std::function<Term(const std::vector<Term>&)>& body,
                   bool universal = true, std::vector<Term> prefix = {}) {
    if (prefix.size() == cols.size()) return body(prefix);
    const TypeId col = cols[prefix.size()];
    auto next = [&](const Term& x) {
      auto ts = prefix;
      ts.push_back(x);
      return forall_cols(cols, body, universal, ts);
    };
    return universal ? forall_over(col, next) : exists_over(col, next);
  }

  Term mem(const RExpr& e, const std::vector<Term>& ts) {
    switch (e.kind) {
      case RKind::Type:
        return type_mem(e.id, ts[0]);
      case RKind::Relation:
        return rel_mem(e.id, ts);
      case RKind::Var:
      case RKind::Atom:
        return smt::mk_eq(ts[0], *scalar(e));
      case RKind::Iden:
        return smt::mk_and({smt::mk_eq(ts[0], ts[1]), type_mem(e.cols[0], ts[0])});
      case RKind::Union:
        return smt::mk_or({mem(*e.args[0], ts), mem(*e.args[1], ts)});
      case RKind::Intersection:
        return smt::mk_and({mem(*e.args[0], ts), mem(*e.args[1], ts)});
      case RKind::Difference:
        return smt::mk_and({mem(*e.args[0], ts), smt::mk_not(mem(*e.args[1], ts))});
      case RKind::Product: {
        const auto m = static_cast<std::size_t>(e.args[0]->arity());
        return smt::mk_and({mem(*e.args[0], std::vector<Term>(ts.begin(), ts.begin() + static_cast<long>(m))),
                            mem(*e.args[1], std::vector<Term>(ts.begin() + static_cast<long>(m), ts.end()))});
      }
      case RKind::Join:
        return join_mem(e, ts);
      case RKind::Closure:
        return closure_mem(e, ts);
      case RKind::Call:
        break;
    }
    throw Error(ErrorKind::Translation, "cannot translate '" + to_string(e) + "'", e.pos);
  }

  Term join_mem(const RExpr& e, const std::vector<Term>& ts) {
    const RExpr& a = *e.args[0];
    const RExpr& b = *e.args[1];
    const auto m = static_cast<std::size_t>(a.arity());
    if (m == 1) {
      if (const auto s = scalar(a)) {
        std::vector<Term> rest{*s};
        rest.insert(rest.end(), ts.begin(), ts.end());
        return mem(b, rest);
      }
    }
    if (b.arity() == 1) {
      if (const auto s = scalar(b)) {
        auto rest = ts;
        rest.push_back(*s);
        return mem(a, rest);
      }
    }
    const std::vector<Term> left(ts.begin(), ts.begin() + static_cast<long>(m - 1));
    const std::vector<Term> right(ts.begin() + static_cast<long>(m - 1), ts.end());
    const TypeId col = meet(a.cols.back(), b.cols.front());
    return exists_over(col, [&](const Term& w) {
      auto l = left;
      l.push_back(w);
      std::vector<Term> r{w};
      r.insert(r.end(), right.begin(), right.end());
      return smt::mk_and({mem(a, l), mem(b, r)});
    });
  }

  // ---- transitive closure --------------------------------------------------------

  Term closure_mem(const RExpr& e, const std::vector<Term>& ts) {
    const RExprPtr& op = e.args[0];
    std::vector<int> vars;
    collect_vars(op, vars);
    std::sort(vars.begin(), vars.end());
    std::string key = to_string(*op);
    std::vector<const Binding*> locals;
    for (int v : vars) {
      const Binding& b = lookup(v);
      if (b.local) {
        locals.push_back(&b);
        key += " v" + std::to_string(v) + "=#";
      } else {
        key += " v" + std::to_string(v) + "=" + smt::print(b.term);
      }
    }
    auto it = t.closure_index.find(key);
    if (it == t.closure_index.end()) {
      define_closure(e, locals);
      it = t.closure_index.emplace(key, static_cast<int>(t.closures.size()) - 1).first;
    }
    std::vector<Term> args = ts;
    for (const auto* b : locals) args.push_back(b->term);
    return smt::app(t.closures[static_cast<std::size_t>(it->second)].symbol, args);
  }

  void define_closure(const RExpr& e, const std::vector<const Binding*>& locals) {
    const RExpr& op = *e.args[0];
    const int depth = required_tc_depth(h, t.plan, e);
    const TypeId d = cover(op.cols[0]);
    ClosureEncoding enc;
    enc.depth = depth;
    enc.sort = sort(op.cols[0]);
    enc.operand = to_string(op);
    const std::string x = fresh("x");
    const std::string y = fresh("y");
    std::vector<smt::SortedVar> params{{x, enc.sort}, {y, sort(op.cols[1])}};
    const std::size_t base = env.size();
    std::vector<Term> extra;
    for (const auto* b : locals) {
      const std::string name = fresh("p");
      params.emplace_back(name, b->sort);
      enc.param_sorts.push_back(b->sort);
      extra.push_back(smt::sym(name));
      env.push_back(Binding{b->var, smt::sym(name), b->sort, true});
    }
    const auto call = [&](const std::string& f, const Term& a, const Term& bb) {
      std::vector<Term> args{a, bb};
      args.insert(args.end(), extra.begin(), extra.end());
      return smt::app(f, args);
    };
    const Term tx = smt::sym(x);
    const Term ty = smt::sym(y);
    const std::string comment = "^" + enc.operand + " unrolled to depth " + std::to_string(depth);
    for (int i = 1; i <= depth; ++i) {
      const std::string name = fresh("iterJoin");
      Term body;
      if (i == 1) {
        body = mem(op, {tx, ty});
      } else {
        std::vector<Term> alts;
        for (const auto& c : constants(d)) alts.push_back(smt::mk_and({mem(op, {tx, c}), call(enc.levels.back(), c, ty)}));
        body = smt::mk_or(std::move(alts));
      }
      enc.levels.push_back(name);
      defs.push_back(define(name, params, body, i == 1 ? comment : std::string()));
    }
    enc.symbol = fresh("tc");
    std::vector<Term> union_of;
    for (const auto& l : enc.levels) union_of.push_back(call(l, tx, ty));
    defs.push_back(define(enc.symbol, params, smt::mk_or(std::move(union_of)), {}));
    env.resize(base);
    t.closures.push_back(std::move(enc));
  }

  static smt::Command define(const std::string& name, const std::vector<smt::SortedVar>& params, Term body,
                             std::string comment) {
    std::vector<Term> decls;
    for (const auto& [n, s] : params) decls.push_back(smt::list({smt::sym(n), smt::sym(s)}));
    return smt::Command{smt::list({smt::sym("define-fun"), smt::sym(name), smt::list(std::move(decls)),
                                   smt::sym("Bool"), std::move(body)}),
                        std::move(comment)};
  }

  // ---- functional images ---------------------------------------------------------

  std::optional<Image> image(const RExpr& e) const {
    if (e.kind == RKind::Relation) return Image{e.id, {}};
    if (e.kind != RKind::Join || e.args[0]->arity() != 1) return std::nullopt;
    const auto s = scalar(*e.args[0]);
    if (!s) return std::nullopt;
    auto inner = image(*e.args[1]);
    if (!inner) return std::nullopt;
    inner->prefix.push_back(*s);
    return inner;
  }

  bool lone_function(const Image& img) const {
    const auto& enc = encoding(img.rel);
    return enc.style == EncodingStyle::Function && enc.nonvalue.has_value();
  }

  std::vector<TypeId> free_domain(const Image& img) const {
    const auto& s = schema(img.rel);
    return std::vector<TypeId>(s.columns.begin() + static_cast<long>(img.prefix.size()), s.columns.end() - 1);
  }

  Term value(const Image& img, const std::vector<Term>& xs) const {
    auto ds = img.prefix;
    ds.insert(ds.end(), xs.begin(), xs.end());
    return apply_fn(img.rel, ds);
  }

  /// Pointwise equality of a lone function slice with an image, a union with a scalar
  /// tuple (function update plus the side condition that the old value is empty or
  /// already the new one), or a difference with a tuple set (update to the non-value).
  std::optional<Term> equal_functional(const RExpr& a, const RExpr& b) {
    const auto fa = image(a);
    if (!fa || !lone_function(*fa)) return std::nullopt;
    const auto& s = schema(fa->rel);
    const std::size_t rest = static_cast<std::size_t>(s.arity()) - fa->prefix.size();
    const Term no = smt::sym(*encoding(fa->rel).nonvalue);
    if (const auto fb = image(b); fb && fb->rel == fa->rel && fb->prefix.size() == fa->prefix.size()) {
      return forall_cols(free_domain(*fa), [&](const std::vector<Term>& xs) {
        return smt::mk_eq(value(*fa, xs), value(*fb, xs));
      });
    }
    if ((b.kind != RKind::Union && b.kind != RKind::Difference) || rest < 2) return std::nullopt;
    const auto fb = image(*b.args[0]);
    if (!fb || fb->rel != fa->rel || fb->prefix.size() != fa->prefix.size()) return std::nullopt;
    std::vector<RExprPtr> factors;
    product_factors(b.args[1], factors);
    if (factors.size() != rest) return std::nullopt;
    std::vector<Term> keys;
    for (std::size_t i = 0; i + 1 < factors.size(); ++i) {
      const auto k = factors[i]->arity() == 1 ? scalar(*factors[i]) : std::nullopt;
      if (!k) return std::nullopt;
      keys.push_back(*k);
    }
    const auto at_key = [&](const std::vector<Term>& xs) {
      std::vector<Term> eqs;
      for (std::size_t i = 0; i < xs.size(); ++i) eqs.push_back(smt::mk_eq(xs[i], keys[i]));
      return smt::mk_and(std::move(eqs));
    };
    const RExpr& last = *factors.back();
    if (b.kind == RKind::Union) {
      const auto target = last.arity() == 1 ? scalar(last) : std::nullopt;
      if (!target) return std::nullopt;
      const Term old = value(*fb, keys);
      auto full = fa->prefix;
      full.insert(full.end(), keys.begin(), keys.end());
      const Term side = smt::mk_and({smt::mk_or({smt::mk_eq(old, *target), smt::mk_eq(old, no)}),
                                     dom(fa->rel, full), type_mem(s.range(), *target)});
      const Term update = forall_cols(free_domain(*fa), [&](const std::vector<Term>& xs) {
        return smt::mk_eq(value(*fa, xs), smt::mk_ite(at_key(xs), *target, value(*fb, xs)));
      });
      return smt::mk_and({side, update});
    }
    const bool whole_range = last.kind == RKind::Type && h.is_subtype(s.range(), last.id);
    return forall_cols(free_domain(*fa), [&](const std::vector<Term>& xs) {
      const Term old = value(*fb, xs);
      const Term hit = whole_range ? at_key(xs) : smt::mk_and({at_key(xs), mem(last, {old})});
      return smt::mk_eq(value(*fa, xs), smt::mk_ite(hit, no, old));
    });
  }

  // ---- formulas ------------------------------------------------------------------

  Term formula(const RFormula& f) {
    switch (f.kind) {
      case FKind::True:
        return smt::mk_true();
      case FKind::False:
        return smt::mk_false();
      case FKind::Not:
        return smt::mk_not(formula(*f.kids[0]));
      case FKind::And:
      case FKind::Or: {
        std::vector<Term> kids;
        for (const auto& k : f.kids) kids.push_back(formula(*k));
        return f.kind == FKind::And ? smt::mk_and(std::move(kids)) : smt::mk_or(std::move(kids));
      }
      case FKind::Implies:
        return smt::mk_implies(formula(*f.kids[0]), formula(*f.kids[1]));
      case FKind::Iff:
        return smt::mk_iff(formula(*f.kids[0]), formula(*f.kids[1]));
      case FKind::Subset:
        return subset(*f.a, *f.b);
      case FKind::Equal:
        return equal(*f.a, *f.b);
      case FKind::Mult:
        return multiplicity(f.quant, *f.a);
      case FKind::Quant:
        return quantified(f);
      case FKind::Call:
        break;
    }
    throw Error(ErrorKind::Translation, "cannot translate '" + to_string(f) + "'", f.pos);
  }

  std::optional<std::vector<Term>> scalar_tuple(const RExprPtr& e) const {
    std::vector<RExprPtr> factors;
    product_factors(e, factors);
    std::vector<Term> out;
    for (const auto& f : factors) {
      const auto s = f->arity() == 1 ? scalar(*f) : std::nullopt;
      if (!s) return std::nullopt;
      out.push_back(*s);
    }
    return out;
  }

  Term subset(const RExpr& a, const RExpr& b) {
    // Rebuild a shared pointer view for the tuple check without copying subtrees.
    if (a.kind == RKind::Var || a.kind == RKind::Atom) return mem(b, {*scalar(a)});
    if (a.kind == RKind::Product) {
      std::vector<Term> ts;
      bool all = true;
      for (const auto& arg : a.args) {
        const auto tup = scalar_tuple(arg);
        if (!tup) {
          all = false;
          break;
        }
        ts.insert(ts.end(), tup->begin(), tup->end());
      }
      if (all) return mem(b, ts);
    }
    return forall_cols(a.cols, [&](const std::vector<Term>& ts) { return smt::mk_implies(mem(a, ts), mem(b, ts)); });
  }

  Term equal(const RExpr& a, const RExpr& b) {
    if (a.arity() == 1 && b.arity() == 1) {
      const auto sa = scalar(a);
      const auto sb = scalar(b);
      if (sa && sb) return smt::mk_eq(*sa, *sb);
    }
    if (auto fast = equal_functional(a, b)) return *fast;
    if (auto fast = equal_functional(b, a)) return *fast;
    std::vector<TypeId> cols;
    for (int i = 0; i < a.arity(); ++i) {
      const TypeId l = h.lca(a.cols[static_cast<std::size_t>(i)], b.cols[static_cast<std::size_t>(i)]);
      if (l == kNoType) return smt::mk_and({multiplicity(Quantifier::No, a), multiplicity(Quantifier::No, b)});
      cols.push_back(l);
    }
    return forall_cols(cols, [&](const std::vector<Term>& ts) { return smt::mk_iff(mem(a, ts), mem(b, ts)); });
  }

  Term multiplicity(Quantifier q, const RExpr& e) {
    if (const auto img = image(e); img && free_domain(*img).empty() && encoding(img->rel).style == EncodingStyle::Function) {
      const auto& enc = encoding(img->rel);
      Term some;
      if (enc.nonvalue) {
        some = smt::mk_not(smt::mk_eq(value(*img, {}), smt::sym(*enc.nonvalue)));
      } else {
        some = dom(img->rel, img->prefix);
      }
      switch (q) {
        case Quantifier::No:
          return smt::mk_not(some);
        case Quantifier::Some:
        case Quantifier::One:
          return some;
        case Quantifier::Lone:
          return smt::mk_true();
        case Quantifier::All:
          break;
      }
    }
    const auto& cols = e.cols;
    switch (q) {
      case Quantifier::No:
        return forall_cols(cols, [&](const std::vector<Term>& ts) { return smt::mk_not(mem(e, ts)); });
      case Quantifier::Some:
        return forall_cols(cols, [&](const std::vector<Term>& ts) { return mem(e, ts); }, false);
      case Quantifier::Lone:
        return forall_cols(cols, [&](const std::vector<Term>& ts) {
          return forall_cols(cols, [&](const std::vector<Term>& us) {
            std::vector<Term> same;
            for (std::size_t i = 0; i < ts.size(); ++i) same.push_back(smt::mk_eq(ts[i], us[i]));
            return smt::mk_implies(smt::mk_and({mem(e, ts), mem(e, us)}), smt::mk_and(std::move(same)));
          });
        });
      case Quantifier::One:
        return smt::mk_and({multiplicity(Quantifier::Some, e), multiplicity(Quantifier::Lone, e)});
      case Quantifier::All:
        break;
    }
    throw Error(ErrorKind::Translation, "'all' is not a multiplicity", e.pos);
  }

  Term quantified(const RFormula& f) {
    if (f.quant != Quantifier::All && f.quant != Quantifier::Some)
      throw Error(ErrorKind::Translation, "quantifier must be desugared before translation", f.pos);
    const RExpr& range = *f.a;
    if (range.arity() != 1) throw Error(ErrorKind::Translation, "quantifier over a non-unary bound", f.pos);
    const bool universal = f.quant == Quantifier::All;
    const TypeId col = range.cols[0];
    const TypeId c = cover(col);
    const auto body_at = [&](const Term& x, bool local) {
      env.push_back(Binding{f.var, x, sort(col), local});
      const Term body = formula(*f.kids[0]);
      env.pop_back();
      return body;
    };
    if (c != kNoType) {
      const bool inside = constants_inside(p, range, c);
      std::vector<Term> parts;
      for (const auto& k : constants(c)) {
        const Term guard = inside ? smt::mk_true() : mem(range, {k});
        const Term body = body_at(k, false);
        parts.push_back(universal ? smt::mk_implies(guard, body) : smt::mk_and({guard, body}));
      }
      return universal ? smt::mk_and(std::move(parts)) : smt::mk_or(std::move(parts));
    }
    const std::string x = fresh(f.var_name.empty() ? "x" : f.var_name);
    const Term tx = smt::sym(x);
    const Term guard = mem(range, {tx});
    const Term body = body_at(tx, true);
    if (universal) return smt::mk_forall({{x, sort(col)}}, smt::mk_implies(guard, body));
    return smt::mk_exists({{x, sort(col)}}, smt::mk_and({guard, body}));
  }
};

FormulaTranslator::FormulaTranslator(const CheckProblem& p, Translation& t) : impl_(std::make_unique<Impl>(p, t)) {
  for (std::size_t i = 0; i < p.skolems.size() && i < t.skolems.size(); ++i) {
    impl_->env.push_back(Impl::Binding{p.skolems[i].var, smt::sym(t.skolems[i]), impl_->sort(p.skolems[i].type), false});
  }
}

FormulaTranslator::~FormulaTranslator() = default;

smt::Term FormulaTranslator::formula(const RFormulaPtr& f) { return impl_->formula(*f); }

smt::Term FormulaTranslator::membership(const RExprPtr& e, const std::vector<smt::Term>& tuple) {
  return impl_->mem(*e, tuple);
}

std::vector<smt::Command> FormulaTranslator::take_definitions() {
  auto out = std::move(impl_->defs);
  impl_->defs.clear();
  return out;
}

// ---- script assembly ------------------------------------------------------------------

namespace {

/// `all b: B, a: S | lone a.(b.r)` over a ternary `some` relation r, which the defining
/// axiom of r can absorb. Returns the relation and S.
std::optional<std::pair<int, TypeId>> fold_pattern(const CheckProblem& p, const RFormula& f) {
  const auto& h = p.hierarchy;
  if (f.kind != FKind::Quant || f.quant != Quantifier::All || f.a->kind != RKind::Type) return std::nullopt;
  const RFormula& inner = *f.kids[0];
  if (inner.kind != FKind::Quant || inner.quant != Quantifier::All || inner.a->kind != RKind::Type) return std::nullopt;
  const RFormula& body = *inner.kids[0];
  if (body.kind != FKind::Mult || body.quant != Quantifier::Lone) return std::nullopt;
  const RExpr& e = *body.a;
  if (e.kind != RKind::Join || e.args[0]->kind != RKind::Var || e.args[0]->id != inner.var) return std::nullopt;
  const RExpr& slice = *e.args[1];
  if (slice.kind != RKind::Join || slice.args[0]->kind != RKind::Var || slice.args[0]->id != f.var) return std::nullopt;
  if (slice.args[1]->kind != RKind::Relation) return std::nullopt;
  const int rel = slice.args[1]->id;
  const auto& s = p.relations[static_cast<std::size_t>(rel)];
  if (s.multiplicity != Multiplicity::Some || s.arity() != 3) return std::nullopt;
  if (!h.is_subtype(s.columns[0], f.a->id)) return std::nullopt;
  const TypeId sub = inner.a->id;
  if (h.top(sub) != h.top(s.columns[1])) return std::nullopt;
  return std::make_pair(rel, sub);
}

class Assembler {
 public:
  Assembler(const CheckProblem& p, const ScopePlan& plan, const TranslateOptions& options)
      : p_(p), h_(p.hierarchy), options_(options) {
    t_.plan = plan;
    for (const char* b : kBuiltins) t_.symbols.insert(b);
  }

  Translation run() {
    name_everything();
    auto& s = t_.script;
    s.comment("alloysmt translation of " + std::filesystem::path(p_.source_name).filename().string() + ", negated assertion " + p_.assertion);
    s.comment(t_.plan.summary(h_));
    if (options_.get_model) s.set_option(":produce-models", "true");
    s.set_logic("UF");
    FormulaTranslator ft(p_, t_);
    tr_ = &ft;
    declare_types();
    declare_bounded();
    declare_relations();
    assert_facts();
    declare_skolems();
    assert_goal();
    s.add(smt::list({smt::sym("check-sat")}));
    if (options_.get_model) s.add(smt::list({smt::sym("get-model")}));
    tr_ = nullptr;
    return std::move(t_);
  }

 private:
  using Impl = FormulaTranslator::Impl;

  Impl& impl() { return tr_->impl(); }

  void name_everything() {
    t_.types.resize(static_cast<std::size_t>(h_.size()));
    for (TypeId ty = 0; ty < h_.size(); ++ty) {
      if (h_.is_top(ty)) t_.types[static_cast<std::size_t>(ty)].sort = claim(t_.symbols, h_.name(ty));
    }
    t_.relations.resize(p_.relations.size());
    for (std::size_t r = 0; r < p_.relations.size(); ++r) t_.relations[r].symbol = claim(t_.symbols, p_.relations[r].name);
    for (const auto& sk : p_.skolems) t_.skolems.push_back(claim(t_.symbols, sk.name));
    for (TypeId ty = 0; ty < h_.size(); ++ty) {
      auto& enc = t_.types[static_cast<std::size_t>(ty)];
      if (!h_.is_top(ty)) {
        enc.sort = t_.types[static_cast<std::size_t>(h_.top(ty))].sort;
        enc.membership = claim(t_.symbols, "is" + h_.name(ty));
      }
    }
    for (TypeId ty : h_.tops()) {
      if (has_nonvalue(p_, ty)) t_.nonvalues[ty] = claim(t_.symbols, "no" + h_.name(ty));
    }
    for (const auto& [ty, b] : t_.plan.bounds) {
      auto& enc = t_.types[static_cast<std::size_t>(ty)];
      for (int i = 0; i < b.atoms; ++i) enc.constants.push_back(claim(t_.symbols, ir::atom(h_, ty, i)->name));
    }
    for (std::size_t r = 0; r < p_.relations.size(); ++r) {
      const auto& s = p_.relations[r];
      auto& enc = t_.relations[r];
      if (s.functional()) {
        enc.style = EncodingStyle::Function;
        if (s.multiplicity == Multiplicity::Lone) enc.nonvalue = t_.nonvalues.at(h_.top(s.range()));
      } else {
        enc.style = EncodingStyle::BooleanColumn;
        if (s.multiplicity == Multiplicity::Some) {
          enc.choose = claim(t_.symbols, "choose" + capitalized(s.name));
          enc.one_target = claim(t_.symbols, "one" + h_.name(s.range()));
        }
      }
    }
    for (const auto& f : p_.facts) {
      if (const auto fold = fold_pattern(p_, *f.formula)) {
        auto& enc = t_.relations[static_cast<std::size_t>(fold->first)];
        if (enc.folded == kNoType) {
          enc.folded = fold->second;
          folded_.push_back(f.formula.get());
          t_.folded_facts.push_back(to_string(*f.formula));
        }
      }
    }
  }

  std::string sort_of(TypeId ty) const { return t_.types[static_cast<std::size_t>(h_.top(ty))].sort; }

  void assert_(Term term, Pos pos) {
    flush();
    if (smt::same(term, smt::mk_true())) return;
    t_.script.assert_(std::move(term), src(pos));
  }

  void flush() {
    for (auto& c : tr_->take_definitions()) t_.script.add(c.term, c.comment);
  }

  Term forall_sort(TypeId ty, const std::function<Term(const Term&)>& body) {
    const std::string x = claim(t_.symbols, "x");
    return smt::mk_forall({{x, sort_of(ty)}}, body(smt::sym(x)));
  }

  void declare_types() {
    auto& s = t_.script;
    for (TypeId ty : h_.tops()) s.add(smt::app("declare-sort", {smt::sym(sort_of(ty)), smt::sym("0")}), src(h_.info(ty).pos));
    for (const auto& [ty, no] : t_.nonvalues) {
      s.add(smt::app("declare-const", {smt::sym(no), smt::sym(sort_of(ty))}), src(nonvalue_pos(ty)));
    }
    for (TypeId ty = 0; ty < h_.size(); ++ty) {
      if (h_.is_top(ty)) continue;
      s.add(smt::list({smt::sym("declare-fun"), smt::sym(t_.types[static_cast<std::size_t>(ty)].membership),
                       sorts({sort_of(ty)}), smt::sym("Bool")}),
            src(h_.info(ty).pos));
    }
    for (TypeId ty = 0; ty < h_.size(); ++ty) {
      if (h_.is_top(ty)) continue;
      const Pos pos = h_.info(ty).pos;
      const TypeId parent = h_.info(ty).parent;
      if (const auto it = t_.nonvalues.find(h_.top(ty)); it != t_.nonvalues.end())
        assert_(smt::mk_not(impl().type_mem(ty, smt::sym(it->second))), pos);
      if (!h_.is_top(parent)) {
        assert_(forall_sort(ty, [&](const Term& x) { return smt::mk_implies(impl().type_mem(ty, x), impl().type_mem(parent, x)); }),
                pos);
      }
    }
    for (TypeId ty = 0; ty < h_.size(); ++ty) {
      const auto kids = h_.extends_children(ty);
      if (kids.empty()) continue;
      const Pos pos = h_.info(kids.back()).pos;
      for (std::size_t i = 0; i < kids.size(); ++i) {
        for (std::size_t j = i + 1; j < kids.size(); ++j) {
          assert_(forall_sort(ty, [&](const Term& x) {
                    return smt::mk_not(smt::mk_and({impl().type_mem(kids[i], x), impl().type_mem(kids[j], x)}));
                  }),
                  pos);
        }
      }
      if (h_.is_exhaustive(ty)) {
        assert_(forall_sort(ty, [&](const Term& x) {
                  std::vector<Term> alts;
                  for (TypeId k : kids) alts.push_back(impl().type_mem(k, x));
                  return smt::mk_implies(impl().type_mem(ty, x), smt::mk_or(std::move(alts)));
                }),
                pos);
      }
    }
  }

  Pos nonvalue_pos(TypeId top) const {
    for (const auto& r : p_.relations) {
      if (r.multiplicity == Multiplicity::Lone && h_.top(r.range()) == top) return r.pos;
    }
    return {};
  }

  void declare_bounded() {
    auto& s = t_.script;
    for (const auto& [ty, b] : t_.plan.bounds) {
      const auto& enc = t_.types[static_cast<std::size_t>(ty)];
      const std::string comment = h_.name(ty) + " finitized to " + std::to_string(b.atoms) + " atoms";
      for (std::size_t i = 0; i < enc.constants.size(); ++i)
        s.add(smt::app("declare-const", {smt::sym(enc.constants[i]), smt::sym(enc.sort)}), i == 0 ? comment : "");
      assert_(forall_sort(ty, [&](const Term& x) {
                std::vector<Term> alts;
                for (const auto& c : enc.constants) alts.push_back(smt::mk_eq(x, smt::sym(c)));
                return smt::mk_implies(impl().type_mem(ty, x), smt::mk_or(std::move(alts)));
              }),
              {});
      if (h_.is_top(ty)) {
        if (const auto it = t_.nonvalues.find(ty); it != t_.nonvalues.end())
          assert_(smt::mk_not(smt::mk_eq(smt::sym(enc.constants[0]), smt::sym(it->second))), {});
      }
    }
  }

  std::vector<smt::SortedVar> column_vars(const RelationSchema& r, std::size_t count) {
    std::vector<smt::SortedVar> vs;
    for (std::size_t i = 0; i < count; ++i) vs.emplace_back(claim(t_.symbols, "x"), sort_of(r.columns[i]));
    return vs;
  }

  static std::vector<Term> symbols_of(const std::vector<smt::SortedVar>& vs) {
    std::vector<Term> out;
    for (const auto& v : vs) out.push_back(smt::sym(v.first));
    return out;
  }

  bool trivial_range(TypeId range) const {
    return h_.is_top(range) && !t_.nonvalues.count(range);
  }

  void declare_relations() {
    auto& s = t_.script;
    for (std::size_t ri = 0; ri < p_.relations.size(); ++ri) {
      const int rel = static_cast<int>(ri);
      const auto& r = p_.relations[ri];
      const auto& enc = t_.relations[ri];
      const Pos pos = r.pos;
      std::vector<std::string> dom_sorts;
      for (std::size_t i = 0; i + 1 < r.columns.size(); ++i) dom_sorts.push_back(sort_of(r.columns[i]));
      const std::string range_sort = sort_of(r.range());
      const auto k = static_cast<std::size_t>(r.arity());
      if (enc.style == EncodingStyle::Function) {
        s.add(smt::list({smt::sym("declare-fun"), smt::sym(enc.symbol), sorts(dom_sorts), smt::sym(range_sort)}), src(pos));
        const auto vs = column_vars(r, k - 1);
        const auto ds = symbols_of(vs);
        const Term value = smt::app(enc.symbol, ds);
        if (enc.nonvalue) {
          const Term no = smt::sym(*enc.nonvalue);
          assert_(smt::mk_forall(vs, smt::mk_implies(smt::mk_not(impl().dom(rel, ds)), smt::mk_eq(value, no))), pos);
          if (!h_.is_top(r.range())) {
            assert_(smt::mk_forall(vs, smt::mk_or({smt::mk_eq(value, no), impl().type_mem(r.range(), value)})), pos);
          }
        } else if (!trivial_range(r.range())) {
          assert_(smt::mk_forall(vs, smt::mk_implies(impl().dom(rel, ds), impl().type_mem(r.range(), value))), pos);
        }
        continue;
      }
      auto all_sorts = dom_sorts;
      all_sorts.push_back(range_sort);
      if (enc.choose) {
        s.add(smt::list({smt::sym("declare-fun"), smt::sym(*enc.choose), sorts(all_sorts), smt::sym("Bool")}), src(pos));
        s.add(smt::list({smt::sym("declare-fun"), smt::sym(*enc.one_target), sorts(dom_sorts), smt::sym(range_sort)}), src(pos));
      }
      s.add(smt::list({smt::sym("declare-fun"), smt::sym(enc.symbol), sorts(all_sorts), smt::sym("Bool")}), src(pos));
      const auto vs = column_vars(r, k);
      const auto ts = symbols_of(vs);
      const std::vector<Term> ds(ts.begin(), ts.end() - 1);
      const Term y = ts.back();
      const Term row = smt::app(enc.symbol, ts);
      if (!enc.choose) {
        assert_(smt::mk_forall(vs, smt::mk_implies(row, smt::mk_and({impl().dom(rel, ds), impl().type_mem(r.range(), y)}))),
                pos);
        continue;
      }
      const Term one = smt::app(*enc.one_target, ds);
      const Term chosen = smt::mk_and({smt::app(*enc.choose, ts), impl().type_mem(r.range(), y)});
      Term rest = chosen;
      if (enc.folded != kNoType) rest = smt::app("ite", {impl().type_mem(enc.folded, ds[1]), smt::mk_false(), chosen});
      const Term defn = smt::app(
          "ite", {smt::mk_not(impl().dom(rel, ds)), smt::mk_false(), smt::app("ite", {smt::mk_eq(y, one), smt::mk_true(), rest})});
      assert_(smt::mk_forall(vs, smt::app("=", {row, defn})), pos);
      const auto dvs = std::vector<smt::SortedVar>(vs.begin(), vs.end() - 1);
      assert_(smt::mk_forall(dvs, smt::mk_implies(impl().dom(rel, ds), impl().type_mem(r.range(), one))), pos);
    }
  }

  static Term sorts(const std::vector<std::string>& names) {
    std::vector<Term> out;
    for (const auto& n : names) out.push_back(smt::sym(n));
    return smt::list(std::move(out));
  }

  void assert_facts() {
    for (const auto& f : p_.facts) {
      if (std::find(folded_.begin(), folded_.end(), f.formula.get()) != folded_.end()) {
        t_.script.comment(src(f.pos) + " folded into the definition of a relation: " + to_string(*f.formula));
        continue;
      }
      for (const auto& part : inline_universals(p_, f.formula, t_.plan)) assert_(tr_->formula(part), f.pos);
    }
  }

  void declare_skolems() {
    for (std::size_t i = 0; i < p_.skolems.size(); ++i) {
      const auto& sk = p_.skolems[i];
      t_.script.add(smt::app("declare-const", {smt::sym(t_.skolems[i]), smt::sym(sort_of(sk.type))}),
                    src(p_.assertion_pos));
      assert_(impl().type_mem(sk.type, smt::sym(t_.skolems[i])), p_.assertion_pos);
    }
  }

  void assert_goal() {
    for (const auto& part : inline_universals(p_, p_.goal, t_.plan)) {
      const Pos pos = part->pos.line > 0 ? part->pos : p_.assertion_pos;
      assert_(tr_->formula(part), pos);
    }
  }

  const CheckProblem& p_;
  const TypeHierarchy& h_;
  TranslateOptions options_;
  Translation t_;
  FormulaTranslator* tr_ = nullptr;
  std::vector<const RFormula*> folded_;
};

}  // namespace

Translation translate(const CheckProblem& p, const ScopePlan& plan, const TranslateOptions& options) {
  return Assembler(p, plan, options).run();
}

// ---- instances as interpretations -----------------------------------------------------

smt::Interpretation to_interpretation(const CheckProblem& p, const Translation& t, const Instance& inst,
                                      const std::vector<int>& skolem_atoms) {
  const auto& h = p.hierarchy;
  smt::Interpretation out;
  std::map<TypeId, std::vector<int>> atoms_of;  // top -> atoms, -1 for the non-value
  std::vector<std::pair<TypeId, int>> where(static_cast<std::size_t>(inst.atoms), {kNoType, -1});
  for (TypeId top : h.tops()) {
    std::vector<int> atoms;
    for (const auto& tup : inst.types[static_cast<std::size_t>(top)].tuples()) atoms.push_back(tup[0]);
    if (t.nonvalues.count(top)) atoms.push_back(-1);
    std::vector<std::string> names;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      names.push_back("elem!" + t.types[static_cast<std::size_t>(top)].sort + "!" + std::to_string(i));
      if (atoms[i] >= 0) where[static_cast<std::size_t>(atoms[i])] = {top, static_cast<int>(i)};
    }
    if (names.empty()) throw Error(ErrorKind::Translation, "instance has an empty sort " + h.name(top));
    out.add_sort(t.types[static_cast<std::size_t>(top)].sort, std::move(names));
    atoms_of[top] = std::move(atoms);
  }
  const auto element = [&](int atom) { return where.at(static_cast<std::size_t>(atom)).second; };
  const auto atom_at = [atoms_of](TypeId top, int elem) { return atoms_of.at(top).at(static_cast<std::size_t>(elem)); };
  for (const auto& [top, no] : t.nonvalues) {
    out.set_constant(no, t.types[static_cast<std::size_t>(top)].sort, static_cast<int>(atoms_of[top].size()) - 1);
  }
  for (TypeId ty = 0; ty < h.size(); ++ty) {
    const auto& enc = t.types[static_cast<std::size_t>(ty)];
    const TypeId top = h.top(ty);
    if (!h.is_top(ty)) {
      const TupleSet members = inst.types[static_cast<std::size_t>(ty)];
      out.set_table(enc.membership, {enc.sort}, "Bool", [=](const std::vector<int>& a) {
        const int atom = atom_at(top, a[0]);
        return atom >= 0 && members.contains({atom}) ? 1 : 0;
      });
    }
    if (!enc.constants.empty()) {
      std::vector<int> members;
      for (const auto& tup : inst.types[static_cast<std::size_t>(ty)].tuples()) members.push_back(element(tup[0]));
      for (std::size_t i = 0; i < enc.constants.size(); ++i) {
        const int value = members.empty() ? 0 : members[std::min(i, members.size() - 1)];
        out.set_constant(enc.constants[i], enc.sort, value);
      }
    }
  }
  for (std::size_t ri = 0; ri < p.relations.size(); ++ri) {
    const auto& r = p.relations[ri];
    const auto& enc = t.relations[ri];
    const TupleSet rows = inst.relations[ri];
    std::vector<TypeId> tops;
    std::vector<std::string> sorts;
    for (TypeId c : r.columns) {
      tops.push_back(h.top(c));
      sorts.push_back(t.types[static_cast<std::size_t>(h.top(c))].sort);
    }
    const std::vector<std::string> dom_sorts(sorts.begin(), sorts.end() - 1);
    const TypeId range_top = tops.back();
    const int no_elem = t.nonvalues.count(range_top) ? static_cast<int>(atoms_of[range_top].size()) - 1 : 0;
    // Rows of a domain tuple given as elements; empty when any element is a non-value.
    const auto targets = [=](const std::vector<int>& ds) {
      std::vector<int> tuple;
      for (std::size_t i = 0; i < ds.size(); ++i) {
        const int a = atom_at(tops[i], ds[i]);
        if (a < 0) return std::vector<int>{};
        tuple.push_back(a);
      }
      std::vector<int> out_elems;
      const auto& range_atoms = atoms_of.at(range_top);
      for (std::size_t e = 0; e < range_atoms.size(); ++e) {
        if (range_atoms[e] < 0) continue;
        auto full = tuple;
        full.push_back(range_atoms[e]);
        if (rows.contains(full)) out_elems.push_back(static_cast<int>(e));
      }
      return out_elems;
    };
    if (enc.style == EncodingStyle::Function) {
      out.set_table(enc.symbol, dom_sorts, sorts.back(), [=](const std::vector<int>& ds) {
        const auto ys = targets(ds);
        return ys.empty() ? no_elem : ys.front();
      });
      continue;
    }
    const auto row = [=](const std::vector<int>& ts) {
      const std::vector<int> ds(ts.begin(), ts.end() - 1);
      const auto ys = targets(ds);
      return std::find(ys.begin(), ys.end(), ts.back()) != ys.end() ? 1 : 0;
    };
    out.set_table(enc.symbol, sorts, "Bool", row);
    if (enc.choose) {
      out.set_table(*enc.choose, sorts, "Bool", row);
      out.set_table(*enc.one_target, dom_sorts, sorts.back(), [=](const std::vector<int>& ds) {
        const auto ys = targets(ds);
        return ys.empty() ? 0 : ys.front();
      });
    }
  }
  for (std::size_t i = 0; i < t.skolems.size() && i < skolem_atoms.size(); ++i) {
    const TypeId top = h.top(p.skolems[i].type);
    out.set_constant(t.skolems[i], t.types[static_cast<std::size_t>(top)].sort, element(skolem_atoms[i]));
  }
  out.load_definitions(t.script);
  return out;
}

}  // namespace alloysmt
