#include "alloysmt/oracle.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>

#include "alloysmt/diagnostics.hpp"

namespace alloysmt {

// ---- evaluator ----------------------------------------------------------------------

Evaluator::Evaluator(const TypeHierarchy& h, const Instance& inst, const CheckedModel* defs)
    : h_(h), inst_(inst), defs_(defs) {}

void Evaluator::bind(int var, TupleSet value) { env_.emplace_back(var, std::move(value)); }

void Evaluator::unbind(int var) {
  for (auto it = env_.rbegin(); it != env_.rend(); ++it) {
    if (it->first == var) {
      env_.erase(std::next(it).base());
      return;
    }
  }
  throw Error(ErrorKind::Oracle, "unbinding an unbound variable");
}

void Evaluator::interpret(TypeId t, int index, int atom) { constants_[{t, index}] = atom; }

const TupleSet& Evaluator::lookup(int var) const {
  for (auto it = env_.rbegin(); it != env_.rend(); ++it) {
    if (it->first == var) return it->second;
  }
  throw Error(ErrorKind::Oracle, "unbound variable v" + std::to_string(var));
}

TupleSet Evaluator::eval(const RExpr& e) {
  switch (e.kind) {
    case RKind::Type:
      return inst_.types.at(static_cast<std::size_t>(e.id));
    case RKind::Relation:
      return inst_.relations.at(static_cast<std::size_t>(e.id));
    case RKind::Var:
      return lookup(e.id);
    case RKind::Atom: {
      const auto it = constants_.find({e.id, e.index});
      if (it != constants_.end()) return TupleSet::singleton(inst_.atoms, it->second);
      throw Error(ErrorKind::Oracle, "finitized constant '" + e.name + "' has no interpretation",
                  e.pos);
    }
    case RKind::Iden:
      return TupleSet::identity(inst_.types.at(static_cast<std::size_t>(e.cols.at(0))));
    case RKind::Union:
      return eval(*e.args[0]).unite(eval(*e.args[1]));
    case RKind::Intersection:
      return eval(*e.args[0]).intersect(eval(*e.args[1]));
    case RKind::Difference:
      return eval(*e.args[0]).minus(eval(*e.args[1]));
    case RKind::Join:
      return eval(*e.args[0]).join(eval(*e.args[1]));
    case RKind::Product:
      return eval(*e.args[0]).product(eval(*e.args[1]));
    case RKind::Closure:
      return eval(*e.args[0]).closure();
    case RKind::Call: {
      if (!defs_) throw Error(ErrorKind::Oracle, "function call '" + e.name + "' not inlined", e.pos);
      const FunDef& fun = defs_->funs.at(static_cast<std::size_t>(e.id));
      std::vector<TupleSet> values;
      for (const auto& a : e.args) values.push_back(eval(*a));
      for (std::size_t i = 0; i < values.size(); ++i) bind(fun.params[i].id, std::move(values[i]));
      TupleSet out = eval(*fun.body);
      for (auto it = fun.params.rbegin(); it != fun.params.rend(); ++it) unbind(it->id);
      return out;
    }
  }
  throw Error(ErrorKind::Oracle, "unknown expression kind");
}

bool Evaluator::quantified(const RFormula& f) {
  const TupleSet range = eval(*f.a);
  std::size_t count = 0;
  bool stop = false;
  range.for_each_index([&](std::size_t atom) {
    if (stop) return;
    bind(f.var, TupleSet::singleton(inst_.atoms, static_cast<int>(atom)));
    const bool v = holds(*f.kids[0]);
    unbind(f.var);
    if (v) ++count;
    switch (f.quant) {
      case Quantifier::All:
        if (!v) stop = true;
        break;
      case Quantifier::Some:
        if (v) stop = true;
        break;
      case Quantifier::No:
        if (v) stop = true;
        break;
      case Quantifier::One:
      case Quantifier::Lone:
        if (count > 1) stop = true;
        break;
    }
  });
  const std::size_t n = range.size();
  switch (f.quant) {
    case Quantifier::All:
      return !stop && count == n;
    case Quantifier::Some:
      return count > 0;
    case Quantifier::No:
      return count == 0;
    case Quantifier::One:
      return count == 1;
    case Quantifier::Lone:
      return count <= 1;
  }
  return false;
}

bool Evaluator::holds(const RFormula& f) {
  switch (f.kind) {
    case FKind::True:
      return true;
    case FKind::False:
      return false;
    case FKind::Not:
      return !holds(*f.kids[0]);
    case FKind::And:
      for (const auto& k : f.kids) {
        if (!holds(*k)) return false;
      }
      return true;
    case FKind::Or:
      for (const auto& k : f.kids) {
        if (holds(*k)) return true;
      }
      return false;
    case FKind::Implies:
      return !holds(*f.kids[0]) || holds(*f.kids[1]);
    case FKind::Iff:
      return holds(*f.kids[0]) == holds(*f.kids[1]);
    case FKind::Subset:
      return eval(*f.a).subset_of(eval(*f.b));
    case FKind::Equal:
      return eval(*f.a) == eval(*f.b);
    case FKind::Mult: {
      const std::size_t n = eval(*f.a).size();
      switch (f.quant) {
        case Quantifier::Some:
          return n > 0;
        case Quantifier::No:
          return n == 0;
        case Quantifier::One:
          return n == 1;
        case Quantifier::Lone:
          return n <= 1;
        case Quantifier::All:
          break;
      }
      throw Error(ErrorKind::Oracle, "'all' is not a cardinality test", f.pos);
    }
    case FKind::Quant:
      return quantified(f);
    case FKind::Call: {
      if (!defs_) throw Error(ErrorKind::Oracle, "predicate call not inlined", f.pos);
      const PredDef& pred = defs_->preds.at(static_cast<std::size_t>(f.id));
      std::vector<TupleSet> values;
      for (const auto& a : f.args) values.push_back(eval(*a));
      for (std::size_t i = 0; i < values.size(); ++i) bind(pred.params[i].id, std::move(values[i]));
      const bool out = holds(*pred.body);
      for (auto it = pred.params.rbegin(); it != pred.params.rend(); ++it) unbind(it->id);
      return out;
    }
  }
  throw Error(ErrorKind::Oracle, "unknown formula kind");
}

// ---- well-formedness ----------------------------------------------------------------

namespace {

std::string tuple_text(const Instance& inst, const std::vector<int>& t) {
  std::string s = "(";
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) s += ", ";
    s += inst.atom_names.at(static_cast<std::size_t>(t[i]));
  }
  return s + ")";
}

/// Domain tuples of a relation: products of the atoms of every column but the last,
/// filtered by the column restrictions.
std::vector<std::vector<int>> domain_tuples(const RelationSchema& r, const Instance& inst) {
  std::vector<std::vector<int>> out{{}};
  for (int c = 0; c + 1 < r.arity(); ++c) {
    std::vector<std::vector<int>> next;
    const TupleSet& col = inst.types.at(static_cast<std::size_t>(r.columns[static_cast<std::size_t>(c)]));
    for (const auto& prefix : out) {
      col.for_each_index([&](std::size_t a) {
        const int restr = r.restriction.empty() ? -1 : r.restriction[static_cast<std::size_t>(c)];
        if (restr >= 0 &&
            !inst.relations.at(static_cast<std::size_t>(restr)).contains({prefix.at(0), static_cast<int>(a)}))
          return;
        auto t = prefix;
        t.push_back(static_cast<int>(a));
        next.push_back(std::move(t));
      });
    }
    out = std::move(next);
  }
  return out;
}

}  // namespace

std::optional<std::string> well_formedness_violation(const TypeHierarchy& h,
                                                     const std::vector<RelationSchema>& rels,
                                                     const Instance& inst) {
  const int n = inst.atoms;
  TupleSet covered(1, n);
  for (TypeId t : h.tops()) {
    const TupleSet& s = inst.types.at(static_cast<std::size_t>(t));
    if (!s.intersect(covered).empty()) return "top-level type " + h.name(t) + " overlaps another";
    covered = covered.unite(s);
  }
  if (static_cast<int>(covered.size()) != n) return std::string("atom outside every top-level type");
  for (TypeId t = 0; t < h.size(); ++t) {
    const TupleSet& s = inst.types.at(static_cast<std::size_t>(t));
    const TypeId parent = h.info(t).parent;
    if (parent != kNoType && !s.subset_of(inst.types.at(static_cast<std::size_t>(parent))))
      return h.name(t) + " not contained in " + h.name(parent);
    const auto kids = h.extends_children(t);
    TupleSet seen(1, n);
    for (TypeId k : kids) {
      const TupleSet& ks = inst.types.at(static_cast<std::size_t>(k));
      if (!ks.intersect(seen).empty()) return "extends-children of " + h.name(t) + " overlap";
      seen = seen.unite(ks);
    }
    if (h.is_exhaustive(t) && seen != s) return "abstract " + h.name(t) + " has an atom in no child";
  }
  for (std::size_t ri = 0; ri < rels.size(); ++ri) {
    const RelationSchema& r = rels[ri];
    const TupleSet& val = inst.relations.at(ri);
    if (val.arity() != r.arity()) return r.name + " has the wrong arity";
    TupleSet typed = inst.types.at(static_cast<std::size_t>(r.columns[0]));
    for (int c = 1; c < r.arity(); ++c)
      typed = typed.product(inst.types.at(static_cast<std::size_t>(r.columns[static_cast<std::size_t>(c)])));
    if (!val.subset_of(typed)) return r.name + " has an ill-typed tuple";
    std::set<std::vector<int>> domain;
    for (auto& d : domain_tuples(r, inst)) domain.insert(std::move(d));
    std::map<std::vector<int>, int> image;
    for (const auto& t : val.tuples()) {
      std::vector<int> d(t.begin(), t.end() - 1);
      if (!domain.count(d)) return r.name + " tuple " + tuple_text(inst, t) + " outside its domain restriction";
      ++image[d];
    }
    for (const auto& d : domain) {
      const int k = image.count(d) ? image[d] : 0;
      const bool ok = (r.multiplicity == Multiplicity::One && k == 1) ||
                      (r.multiplicity == Multiplicity::Lone && k <= 1) ||
                      (r.multiplicity == Multiplicity::Some && k >= 1) ||
                      r.multiplicity == Multiplicity::Set;
      if (!ok) return r.name + " violates its multiplicity at " + tuple_text(inst, d);
    }
  }
  return std::nullopt;
}

bool satisfies(const CheckProblem& p, const Counterexample& c, std::string* why) {
  auto fail = [&](std::string msg) {
    if (why) *why = std::move(msg);
    return false;
  };
  if (auto v = well_formedness_violation(p.hierarchy, p.relations, c.instance)) return fail(*v);
  if (c.skolem_atoms.size() != p.skolems.size()) return fail("skolem binding count mismatch");
  Evaluator ev(p.hierarchy, c.instance);
  for (std::size_t i = 0; i < p.skolems.size(); ++i) {
    const int a = c.skolem_atoms[i];
    if (a < 0 || a >= c.instance.atoms ||
        !c.instance.types.at(static_cast<std::size_t>(p.skolems[i].type)).contains({a}))
      return fail("skolem " + p.skolems[i].name + " bound outside its type");
    ev.bind(p.skolems[i].var, TupleSet::singleton(c.instance.atoms, a));
  }
  for (const auto& f : p.facts) {
    if (!ev.holds(*f.formula)) return fail("fact " + f.name + " fails");
  }
  if (!ev.holds(*p.goal)) return fail("negated assertion fails");
  return true;
}

// ---- bounds and estimates -----------------------------------------------------------

std::vector<int> resolve_bounds(const TypeHierarchy& h, const Bounds& bounds) {
  std::vector<int> out(static_cast<std::size_t>(h.size()), -1);
  for (TypeId t = 0; t < h.size(); ++t) {
    auto it = bounds.find(t);
    if (it != bounds.end()) {
      if (it->second < 0) throw Error(ErrorKind::Oracle, "negative bound for " + h.name(t));
      out[static_cast<std::size_t>(t)] = it->second;
    } else if (h.is_top(t)) {
      throw Error(ErrorKind::Oracle, "no bound for top-level type " + h.name(t));
    } else {
      out[static_cast<std::size_t>(t)] = out[static_cast<std::size_t>(h.info(t).parent)];
    }
    if (!h.is_top(t)) {
      auto& b = out[static_cast<std::size_t>(t)];
      b = std::min(b, out[static_cast<std::size_t>(h.info(t).parent)]);
    }
  }
  return out;
}

namespace {

/// Subtype membership patterns of one atom of a top-level type: the set of descendants
/// containing it, as a bitmask over `descendants(top)`, in increasing mask order.
std::vector<unsigned> membership_patterns(const TypeHierarchy& h, TypeId top) {
  const auto subs = h.descendants(top);
  if (subs.size() > 20) throw Error(ErrorKind::Oracle, "too many subtypes below " + h.name(top));
  std::vector<unsigned> out;
  for (unsigned mask = 0; mask < (1u << subs.size()); ++mask) {
    auto member = [&](TypeId t) {
      if (t == top) return true;
      for (std::size_t i = 0; i < subs.size(); ++i) {
        if (subs[i] == t) return ((mask >> i) & 1u) != 0;
      }
      return false;
    };
    bool ok = true;
    for (std::size_t i = 0; i < subs.size() && ok; ++i) {
      if (((mask >> i) & 1u) && !member(h.info(subs[i]).parent)) ok = false;
    }
    std::vector<TypeId> scope = subs;
    scope.push_back(top);
    for (TypeId t : scope) {
      if (!ok || !member(t)) continue;
      int inside = 0;
      for (TypeId k : h.extends_children(t)) inside += member(k) ? 1 : 0;
      if (inside > 1 || (h.is_exhaustive(t) && inside != 1)) ok = false;
    }
    if (ok) out.push_back(mask);
  }
  return out;
}

double choices_for(Multiplicity m, int range, bool prune) {
  const double all = std::pow(2.0, range);
  if (!prune) return all;
  switch (m) {
    case Multiplicity::One:
      return range;
    case Multiplicity::Lone:
      return range + 1;
    case Multiplicity::Some:
      return all - 1;
    case Multiplicity::Set:
      return all;
  }
  return all;
}

/// Odometer over top-level sizes: 1..bound each, or exactly 0 for a zero bound.
template <class F>
void for_each_size(const std::vector<int>& tb, F&& f) {
  std::vector<int> lo(tb.size()), size(tb.size());
  for (std::size_t i = 0; i < tb.size(); ++i) lo[i] = size[i] = std::min(1, tb[i]);
  while (true) {
    if (!f(size)) return;
    std::size_t i = 0;
    while (i < size.size() && size[i] == tb[i]) {
      size[i] = lo[i];
      ++i;
    }
    if (i == size.size()) return;
    ++size[i];
  }
}

}  // namespace

double estimate_state_space(const CheckProblem& p, const Bounds& bounds) {
  const TypeHierarchy& h = p.hierarchy;
  const auto tb = resolve_bounds(h, bounds);
  const auto tops = h.tops();
  std::vector<int> top_bounds;
  for (TypeId t : tops) top_bounds.push_back(tb[static_cast<std::size_t>(t)]);
  std::vector<double> patterns;
  for (TypeId t : tops) patterns.push_back(static_cast<double>(membership_patterns(h, t).size()));
  double total = 0;
  for_each_size(top_bounds, [&](const std::vector<int>& size) {
    auto count = [&](TypeId t) {
      const auto it = std::find(tops.begin(), tops.end(), h.top(t));
      const int s = size[static_cast<std::size_t>(it - tops.begin())];
      return static_cast<double>(std::min(s, tb[static_cast<std::size_t>(t)]));
    };
    double x = 1;
    for (std::size_t i = 0; i < tops.size(); ++i) x *= std::pow(patterns[i], size[i]);
    for (const auto& r : p.relations) {
      double dom = 1;
      for (int c = 0; c + 1 < r.arity(); ++c) dom *= count(r.columns[static_cast<std::size_t>(c)]);
      x *= std::pow(choices_for(r.multiplicity, static_cast<int>(count(r.range())), true), dom);
    }
    for (const auto& s : p.skolems) x *= std::max(1.0, count(s.type));
    total += x;
    return true;
  });
  return total;
}

// ---- enumeration --------------------------------------------------------------------

namespace {

void collect_relations(const RExpr& e, std::set<int>& out) {
  if (e.kind == RKind::Relation) out.insert(e.id);
  for (const auto& a : e.args) collect_relations(*a, out);
}

void collect_relations(const RFormula& f, std::set<int>& out) {
  if (f.a) collect_relations(*f.a, out);
  if (f.b) collect_relations(*f.b, out);
  for (const auto& a : f.args) collect_relations(*a, out);
  for (const auto& k : f.kids) collect_relations(*k, out);
}

class Enumerator {
 public:
  Enumerator(const CheckProblem& p, std::vector<int> tb, const OracleOptions& o)
      : p_(p), h_(p.hierarchy), tb_(std::move(tb)), opt_(o), tops_(h_.tops()) {
    for (TypeId t : tops_) {
      subs_.push_back(h_.descendants(t));
      patterns_.push_back(membership_patterns(h_, t));
    }
    fact_ready_.resize(p_.relations.size() + 1);
    for (std::size_t i = 0; i < p_.facts.size(); ++i) {
      std::set<int> rs;
      collect_relations(*p_.facts[i].formula, rs);
      const std::size_t at = rs.empty() ? 0 : static_cast<std::size_t>(*rs.rbegin()) + 1;
      fact_ready_[at].push_back(i);
    }
    std::vector<RFormulaPtr> parts;
    if (p_.goal->kind == FKind::And) {
      parts = p_.goal->kids;
    } else {
      parts = {p_.goal};
    }
    goal_ready_.resize(p_.skolems.size() + 1);
    for (const auto& g : parts) {
      std::size_t level = 0;
      for (int v : free_vars(g)) {
        const auto k = p_.skolem_of_var(v);
        if (!k) throw Error(ErrorKind::Oracle, "goal has a free variable that is not a skolem constant");
        level = std::max(level, static_cast<std::size_t>(*k) + 1);
      }
      goal_ready_[level].push_back(g);
    }
  }

  OracleResult run() {
    std::vector<int> top_bounds;
    for (TypeId t : tops_) top_bounds.push_back(tb_[static_cast<std::size_t>(t)]);
    for_each_size(top_bounds, [&](const std::vector<int>& size) { return !with_sizes(size); });
    result_.outcome = found_ ? OracleOutcome::Counterexample : OracleOutcome::NoCounterexample;
    return result_;
  }

 private:
  const CheckProblem& p_;
  const TypeHierarchy& h_;
  std::vector<int> tb_;
  OracleOptions opt_;
  std::vector<TypeId> tops_;
  std::vector<std::vector<TypeId>> subs_;
  std::vector<std::vector<unsigned>> patterns_;
  std::vector<std::vector<std::size_t>> fact_ready_;  // by number of assigned relations
  std::vector<std::vector<RFormulaPtr>> goal_ready_;  // by number of bound skolems
  Instance inst_;
  std::vector<int> atom_top_;  // index into tops_
  std::vector<int> skolem_atoms_;
  bool found_ = false;
  OracleResult result_;

  bool with_sizes(const std::vector<int>& size) {
    inst_ = Instance{};
    atom_top_.clear();
    for (std::size_t i = 0; i < tops_.size(); ++i) {
      for (int k = 0; k < size[i]; ++k) {
        inst_.atom_names.push_back(h_.name(tops_[i]) + "$" + std::to_string(k));
        atom_top_.push_back(static_cast<int>(i));
      }
    }
    inst_.atoms = static_cast<int>(atom_top_.size());
    inst_.types.assign(static_cast<std::size_t>(h_.size()), TupleSet(1, inst_.atoms));
    for (const auto& r : p_.relations) inst_.relations.emplace_back(r.arity(), inst_.atoms);
    std::vector<std::size_t> choice(static_cast<std::size_t>(inst_.atoms), 0);
    while (true) {
      if (assign_types(choice) && relations(0)) return true;
      std::size_t i = 0;
      while (i < choice.size() &&
             choice[i] + 1 == patterns_[static_cast<std::size_t>(atom_top_[i])].size()) {
        choice[i] = 0;
        ++i;
      }
      if (i == choice.size()) return false;
      ++choice[i];
    }
  }

  /// Builds the type sets from per-atom patterns; false when a subtype bound is exceeded.
  bool assign_types(const std::vector<std::size_t>& choice) {
    for (auto& t : inst_.types) t.clear();
    for (int a = 0; a < inst_.atoms; ++a) {
      const auto ti = static_cast<std::size_t>(atom_top_[static_cast<std::size_t>(a)]);
      inst_.types[static_cast<std::size_t>(tops_[ti])].insert_index(static_cast<std::size_t>(a));
      const unsigned mask = patterns_[ti][choice[static_cast<std::size_t>(a)]];
      for (std::size_t s = 0; s < subs_[ti].size(); ++s) {
        if ((mask >> s) & 1u) inst_.types[static_cast<std::size_t>(subs_[ti][s])].insert_index(static_cast<std::size_t>(a));
      }
    }
    for (TypeId t = 0; t < h_.size(); ++t) {
      if (static_cast<int>(inst_.types[static_cast<std::size_t>(t)].size()) > tb_[static_cast<std::size_t>(t)])
        return false;
    }
    return true;
  }

  bool facts_hold(std::size_t ready) {
    if (!opt_.prune) return true;
    Evaluator ev(h_, inst_);
    for (std::size_t i : fact_ready_[ready]) {
      if (!ev.holds(*p_.facts[i].formula)) return false;
    }
    return true;
  }

  /// Assigns relation `ri` and everything after it; true once a counterexample is found.
  bool relations(std::size_t ri) {
    if (ri == 0 && !facts_hold(0)) return false;
    if (ri == p_.relations.size()) return leaf();
    const RelationSchema& r = p_.relations[ri];
    std::vector<std::vector<int>> domain;
    if (opt_.prune) {
      domain = domain_tuples(r, inst_);
    } else {
      RelationSchema open = r;
      open.restriction.assign(r.columns.size(), -1);
      domain = domain_tuples(open, inst_);
    }
    std::vector<int> range;
    inst_.types[static_cast<std::size_t>(r.range())].for_each_index(
        [&](std::size_t a) { range.push_back(static_cast<int>(a)); });
    const auto options = row_choices(r.multiplicity, range);
    TupleSet& val = inst_.relations[ri];
    val.clear();
    std::function<bool(std::size_t)> row = [&](std::size_t di) -> bool {
      if (di == domain.size()) {
        if (!facts_hold(ri + 1)) return false;
        return relations(ri + 1);
      }
      const std::size_t base = val.index_of([&] {
        auto t = domain[di];
        t.push_back(0);
        return t;
      }());
      for (const auto& opt : options) {
        for (int a : opt) val.insert_index(base + static_cast<std::size_t>(a));
        const bool hit = row(di + 1);
        for (int a : opt) val.erase_index(base + static_cast<std::size_t>(a));
        if (hit) {
          for (int a : opt) val.insert_index(base + static_cast<std::size_t>(a));
          return true;
        }
      }
      return false;
    };
    return row(0);
  }

  std::vector<std::vector<int>> row_choices(Multiplicity m, const std::vector<int>& range) const {
    std::vector<std::vector<int>> out;
    if (opt_.prune && m == Multiplicity::One) {
      for (int a : range) out.push_back({a});
      return out;
    }
    if (opt_.prune && m == Multiplicity::Lone) {
      out.push_back({});
      for (int a : range) out.push_back({a});
      return out;
    }
    const unsigned limit = 1u << range.size();
    for (unsigned mask = 0; mask < limit; ++mask) {
      if (opt_.prune && m == Multiplicity::Some && mask == 0) continue;
      std::vector<int> s;
      for (std::size_t i = 0; i < range.size(); ++i) {
        if ((mask >> i) & 1u) s.push_back(range[i]);
      }
      out.push_back(std::move(s));
    }
    return out;
  }

  bool leaf() {
    ++result_.stats.instances;
    if (!opt_.prune) {
      if (well_formedness_violation(h_, p_.relations, inst_)) return false;
      Evaluator ev(h_, inst_);
      for (const auto& f : p_.facts) {
        if (!ev.holds(*f.formula)) return false;
      }
    }
    skolem_atoms_.assign(p_.skolems.size(), -1);
    Evaluator ev(h_, inst_);
    return bind_skolem(ev, 0);
  }

  bool goal_holds(Evaluator& ev, std::size_t level) {
    if (!opt_.prune && level < p_.skolems.size()) return true;
    const std::size_t from = opt_.prune ? level : 0;
    for (std::size_t l = from; l <= level; ++l) {
      for (const auto& g : goal_ready_[l]) {
        if (!ev.holds(*g)) return false;
      }
    }
    return true;
  }

  bool bind_skolem(Evaluator& ev, std::size_t k) {
    if (k == p_.skolems.size()) ++result_.stats.bindings;
    if (!goal_holds(ev, k)) return false;
    if (k == p_.skolems.size()) {
      found_ = true;
      result_.counterexample = Counterexample{inst_, skolem_atoms_};
      return true;
    }
    const SkolemConst& s = p_.skolems[k];
    std::vector<int> atoms;
    inst_.types[static_cast<std::size_t>(s.type)].for_each_index(
        [&](std::size_t a) { atoms.push_back(static_cast<int>(a)); });
    for (int a : atoms) {
      skolem_atoms_[k] = a;
      ev.bind(s.var, TupleSet::singleton(inst_.atoms, a));
      const bool hit = bind_skolem(ev, k + 1);
      ev.unbind(s.var);
      if (hit) return true;
    }
    skolem_atoms_[k] = -1;
    return false;
  }
};

}  // namespace

OracleResult check_within_scope(const CheckProblem& p, const Bounds& bounds,
                                const OracleOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const auto tb = resolve_bounds(p.hierarchy, bounds);
  const double estimate = estimate_state_space(p, bounds);
  OracleResult result;
  const bool too_big = estimate > options.ceiling;
  OracleStrategy strategy = options.strategy;
  if (strategy == OracleStrategy::Auto) strategy = too_big ? OracleStrategy::Sat : OracleStrategy::Enumerate;
  if (strategy == OracleStrategy::Enumerate && too_big) {
    result.outcome = OracleOutcome::Refused;
    std::ostringstream msg;
    msg << "estimated " << estimate << " candidate valuations exceed the ceiling of " << options.ceiling;
    result.detail = msg.str();
  } else if (strategy == OracleStrategy::Sat) {
    result = check_with_sat(p, tb);
  } else {
    result = Enumerator(p, tb, options).run();
  }
  result.stats.estimate = estimate;
  result.stats.strategy = strategy == OracleStrategy::Sat ? "sat" : "enumerate";
  result.stats.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (result.counterexample) {
    std::string why;
    if (!satisfies(p, *result.counterexample, &why))
      throw Error(ErrorKind::Oracle, "internal: counterexample does not satisfy the problem: " + why);
  }
  return result;
}

// ---- rendering ----------------------------------------------------------------------

std::string atom_label(const TypeHierarchy& h, const Instance& inst, int atom) {
  TypeId best = kNoType;
  for (TypeId t = 0; t < h.size(); ++t) {
    if (!inst.types.at(static_cast<std::size_t>(t)).contains({atom})) continue;
    if (best == kNoType || h.depth(t) > h.depth(best)) best = t;
  }
  if (best == kNoType) return inst.atom_names.at(static_cast<std::size_t>(atom));
  int k = 0;
  for (int a = 0; a < atom; ++a) {
    if (atom_label(h, inst, a).rfind(h.name(best) + "$", 0) == 0) ++k;
  }
  return h.name(best) + "$" + std::to_string(k);
}

std::string render(const CheckProblem& p, const Counterexample& c) {
  const auto& h = p.hierarchy;
  std::vector<std::string> label;
  for (int a = 0; a < c.instance.atoms; ++a) label.push_back(atom_label(h, c.instance, a));
  auto set_text = [&](const TupleSet& s) {
    std::string out = "{";
    bool first = true;
    for (const auto& t : s.tuples()) {
      if (!first) out += ", ";
      first = false;
      for (std::size_t i = 0; i < t.size(); ++i) {
        if (i) out += "->";
        out += label[static_cast<std::size_t>(t[i])];
      }
    }
    return out + "}";
  };
  std::ostringstream os;
  for (TypeId t = 0; t < h.size(); ++t)
    os << "  " << h.name(t) << " = " << set_text(c.instance.types[static_cast<std::size_t>(t)]) << "\n";
  for (std::size_t r = 0; r < p.relations.size(); ++r)
    os << "  " << p.relations[r].name << " = " << set_text(c.instance.relations[r]) << "\n";
  for (std::size_t k = 0; k < p.skolems.size(); ++k)
    os << "  " << p.skolems[k].name << " = " << label[static_cast<std::size_t>(c.skolem_atoms[k])] << "\n";
  return os.str();
}

}  // namespace alloysmt
