#include <algorithm>
#include <functional>
#include <map>
#include <sstream>
#include <unordered_map>

#include "alloysmt/diagnostics.hpp"
#include "alloysmt/oracle.hpp"
#include "alloysmt/sat.hpp"

namespace alloysmt {

namespace {

/// Hash-consed and-inverter graph. A gate is 2*node + negated; node 0 is the constant
/// true, so gate 0 is true and gate 1 is false.
class Circuit {
 public:
  static constexpr int kTrue = 0;
  static constexpr int kFalse = 1;

  Circuit() { nodes_.push_back({-1, -1, 0}); }

  int input(int sat_var) {
    nodes_.push_back({-1, -1, sat_var});
    return 2 * (static_cast<int>(nodes_.size()) - 1);
  }

  static int negate(int g) { return g ^ 1; }

  int conj(int a, int b) {
    if (a == kFalse || b == kFalse || a == negate(b)) return kFalse;
    if (a == kTrue) return b;
    if (b == kTrue || a == b) return a;
    if (a > b) std::swap(a, b);
    const auto key = (static_cast<std::uint64_t>(static_cast<unsigned>(a)) << 32) | static_cast<unsigned>(b);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    nodes_.push_back({a, b, 0});
    const int g = 2 * (static_cast<int>(nodes_.size()) - 1);
    memo_.emplace(key, g);
    return g;
  }
  int disj(int a, int b) { return negate(conj(negate(a), negate(b))); }
  int implies(int a, int b) { return disj(negate(a), b); }
  int iff(int a, int b) { return conj(implies(a, b), implies(b, a)); }
  int all(const std::vector<int>& gs) {
    int r = kTrue;
    for (int g : gs) r = conj(r, g);
    return r;
  }
  int any(const std::vector<int>& gs) {
    int r = kFalse;
    for (int g : gs) r = disj(r, g);
    return r;
  }

  /// Tseitin literal for a gate; introduces solver variables on first use.
  int literal(int g, sat::Solver& s) {
    const int node = g >> 1;
    int lit = encode(node, s);
    return (g & 1) ? -lit : lit;
  }

  /// Value of a gate under the solver's model.
  bool value(int g, const sat::Solver& s) {
    const int node = g >> 1;
    bool v = node_value(node, s);
    return (g & 1) ? !v : v;
  }

 private:
  struct Node {
    int a, b;
    int var;  // solver variable of an input or an encoded gate; 0 if none
  };
  std::vector<Node> nodes_;
  std::unordered_map<std::uint64_t, int> memo_;
  std::vector<int> encoded_;
  std::vector<std::int8_t> cached_;

  int encode(int node, sat::Solver& s) {
    if (encoded_.size() < nodes_.size()) encoded_.resize(nodes_.size(), 0);
    if (encoded_[static_cast<std::size_t>(node)]) return encoded_[static_cast<std::size_t>(node)];
    if (node == 0) {
      const int v = s.new_var();
      s.add_clause({v});
      encoded_[0] = v;
      return v;
    }
    if (nodes_[static_cast<std::size_t>(node)].a < 0) {
      encoded_[static_cast<std::size_t>(node)] = nodes_[static_cast<std::size_t>(node)].var;
      return nodes_[static_cast<std::size_t>(node)].var;
    }
    // Post-order without recursion: and-chains can be long.
    std::vector<int> stack{node};
    while (!stack.empty()) {
      const int n = stack.back();
      if (encoded_[static_cast<std::size_t>(n)]) {
        stack.pop_back();
        continue;
      }
      const Node nd = nodes_[static_cast<std::size_t>(n)];
      if (nd.a < 0 || n == 0) {
        stack.pop_back();
        if (n == 0) {
          encode(0, s);
        } else {
          encoded_[static_cast<std::size_t>(n)] = nd.var;
        }
        continue;
      }
      const int na = nd.a >> 1;
      const int nb = nd.b >> 1;
      if (!encoded_[static_cast<std::size_t>(na)]) {
        stack.push_back(na);
        continue;
      }
      if (!encoded_[static_cast<std::size_t>(nb)]) {
        stack.push_back(nb);
        continue;
      }
      stack.pop_back();
      const int la = (nd.a & 1) ? -encoded_[static_cast<std::size_t>(na)] : encoded_[static_cast<std::size_t>(na)];
      const int lb = (nd.b & 1) ? -encoded_[static_cast<std::size_t>(nb)] : encoded_[static_cast<std::size_t>(nb)];
      const int v = s.new_var();
      s.add_clause({-v, la});
      s.add_clause({-v, lb});
      s.add_clause({v, -la, -lb});
      encoded_[static_cast<std::size_t>(n)] = v;
    }
    return encoded_[static_cast<std::size_t>(node)];
  }

  bool node_value(int node, const sat::Solver& s) {
    if (cached_.size() < nodes_.size()) cached_.resize(nodes_.size(), -1);
    if (node == 0) return true;
    if (cached_[static_cast<std::size_t>(node)] >= 0) return cached_[static_cast<std::size_t>(node)] == 1;
    std::vector<int> stack{node};
    while (!stack.empty()) {
      const int n = stack.back();
      if (n == 0 || cached_[static_cast<std::size_t>(n)] >= 0) {
        stack.pop_back();
        continue;
      }
      const Node nd = nodes_[static_cast<std::size_t>(n)];
      if (nd.a < 0) {
        cached_[static_cast<std::size_t>(n)] = s.value(nd.var) ? 1 : 0;
        stack.pop_back();
        continue;
      }
      const int na = nd.a >> 1;
      const int nb = nd.b >> 1;
      const bool ready_a = na == 0 || cached_[static_cast<std::size_t>(na)] >= 0;
      const bool ready_b = nb == 0 || cached_[static_cast<std::size_t>(nb)] >= 0;
      if (!ready_a) stack.push_back(na);
      if (!ready_b) stack.push_back(nb);
      if (!ready_a || !ready_b) continue;
      stack.pop_back();
      auto val = [&](int g) {
        const int m = g >> 1;
        const bool v = m == 0 ? true : cached_[static_cast<std::size_t>(m)] == 1;
        return (g & 1) ? !v : v;
      };
      cached_[static_cast<std::size_t>(n)] = (val(nd.a) && val(nd.b)) ? 1 : 0;
    }
    return cached_[static_cast<std::size_t>(node)] == 1;
  }
};

/// A relation over the universe as a dense array of gates.
struct Matrix {
  int arity = 0;
  std::vector<int> cells;
};

class Grounder {
 public:
  Grounder(const CheckProblem& p, const std::vector<int>& tb) : p_(p), h_(p.hierarchy), tb_(tb) {
    for (TypeId t : h_.tops()) {
      offset_[t] = n_;
      n_ += tb_[static_cast<std::size_t>(t)];
    }
    for (TypeId t : h_.tops()) {
      for (int i = 0; i < tb_[static_cast<std::size_t>(t)]; ++i) atom_top_.push_back(t);
    }
  }

  OracleResult run() {
    build_universe();
    build_relations();
    build_skolems();
    std::vector<int> roots;
    for (const auto& f : p_.facts) roots.push_back(formula(*f.formula));
    roots.push_back(formula(*p_.goal));
    for (int g : roots) require(g);

    OracleResult result;
    const bool sat = solver_.solve();
    std::ostringstream detail;
    detail << "sat strategy: " << solver_.num_vars() << " variables, " << solver_.num_clauses()
           << " clauses, " << solver_.conflicts() << " conflicts";
    result.detail = detail.str();
    if (!sat) {
      result.outcome = OracleOutcome::NoCounterexample;
      return result;
    }
    result.outcome = OracleOutcome::Counterexample;
    result.counterexample = extract();
    return result;
  }

 private:
  const CheckProblem& p_;
  const TypeHierarchy& h_;
  const std::vector<int>& tb_;
  std::map<TypeId, int> offset_;
  int n_ = 0;
  std::vector<TypeId> atom_top_;
  Circuit c_;
  sat::Solver solver_;
  std::vector<Matrix> types_;
  std::vector<Matrix> rels_;
  std::vector<std::vector<int>> skolem_gates_;
  std::vector<std::pair<int, Matrix>> env_;

  int fresh() { return c_.input(solver_.new_var()); }
  void require(int g) { solver_.add_clause({c_.literal(g, solver_)}); }

  std::size_t power(int k) const {
    std::size_t r = 1;
    for (int i = 0; i < k; ++i) r *= static_cast<std::size_t>(n_);
    return r;
  }

  Matrix empty(int arity) const { return Matrix{arity, std::vector<int>(power(arity), Circuit::kFalse)}; }

  std::vector<int> atoms_of_top(TypeId top) const {
    std::vector<int> out;
    for (int i = 0; i < tb_[static_cast<std::size_t>(top)]; ++i) out.push_back(offset_.at(top) + i);
    return out;
  }

  void at_most(const std::vector<int>& gates, int k) {
    // Forbids every (k+1)-subset; the groups involved are small.
    std::vector<int> pick;
    std::function<void(std::size_t)> rec = [&](std::size_t from) {
      if (static_cast<int>(pick.size()) == k + 1) {
        std::vector<int> g;
        for (int i : pick) g.push_back(gates[static_cast<std::size_t>(i)]);
        require(Circuit::negate(c_.all(g)));
        return;
      }
      for (std::size_t i = from; i < gates.size(); ++i) {
        pick.push_back(static_cast<int>(i));
        rec(i + 1);
        pick.pop_back();
      }
    };
    rec(0);
  }

  void build_universe() {
    types_.assign(static_cast<std::size_t>(h_.size()), empty(1));
    for (TypeId top : h_.tops()) {
      const auto atoms = atoms_of_top(top);
      int prev = Circuit::kTrue;
      for (std::size_t i = 0; i < atoms.size(); ++i) {
        const int present = i == 0 ? Circuit::kTrue : fresh();
        require(c_.implies(present, prev));
        types_[static_cast<std::size_t>(top)].cells[static_cast<std::size_t>(atoms[i])] = present;
        prev = present;
      }
    }
    for (TypeId t = 0; t < h_.size(); ++t) {
      if (h_.is_top(t)) continue;
      const TypeId parent = h_.info(t).parent;
      for (int a : atoms_of_top(h_.top(t))) {
        const int g = fresh();
        require(c_.implies(g, types_[static_cast<std::size_t>(parent)].cells[static_cast<std::size_t>(a)]));
        types_[static_cast<std::size_t>(t)].cells[static_cast<std::size_t>(a)] = g;
      }
    }
    for (TypeId t = 0; t < h_.size(); ++t) {
      const auto kids = h_.extends_children(t);
      for (int a : atoms_of_top(h_.top(t))) {
        std::vector<int> in;
        for (TypeId k : kids) in.push_back(types_[static_cast<std::size_t>(k)].cells[static_cast<std::size_t>(a)]);
        if (in.size() > 1) at_most(in, 1);
        if (h_.is_exhaustive(t))
          require(c_.implies(types_[static_cast<std::size_t>(t)].cells[static_cast<std::size_t>(a)], c_.any(in)));
      }
      const int bound = tb_[static_cast<std::size_t>(t)];
      const auto atoms = atoms_of_top(h_.top(t));
      if (bound < static_cast<int>(atoms.size())) {
        std::vector<int> in;
        for (int a : atoms) in.push_back(types_[static_cast<std::size_t>(t)].cells[static_cast<std::size_t>(a)]);
        at_most(in, bound);
      }
    }
  }

  std::size_t index(const std::vector<int>& t) const {
    std::size_t i = 0;
    for (int a : t) i = i * static_cast<std::size_t>(n_) + static_cast<std::size_t>(a);
    return i;
  }

  /// All tuples over the atoms of the columns' top-level types.
  std::vector<std::vector<int>> typed_tuples(const std::vector<TypeId>& cols) const {
    std::vector<std::vector<int>> out{{}};
    for (TypeId c : cols) {
      std::vector<std::vector<int>> next;
      for (const auto& prefix : out) {
        for (int a : atoms_of_top(h_.top(c))) {
          auto t = prefix;
          t.push_back(a);
          next.push_back(std::move(t));
        }
      }
      out = std::move(next);
    }
    return out;
  }

  int in_domain(const RelationSchema& r, const std::vector<int>& d) {
    std::vector<int> g;
    for (std::size_t c = 0; c < d.size(); ++c) {
      g.push_back(types_[static_cast<std::size_t>(r.columns[c])].cells[static_cast<std::size_t>(d[c])]);
      const int restr = r.restriction.empty() ? -1 : r.restriction[c];
      if (restr >= 0) g.push_back(rels_[static_cast<std::size_t>(restr)].cells[index({d[0], d[c]})]);
    }
    return c_.all(g);
  }

  void build_relations() {
    for (const auto& r : p_.relations) {
      Matrix m = empty(r.arity());
      std::vector<TypeId> dom_cols(r.columns.begin(), r.columns.end() - 1);
      const auto range = atoms_of_top(h_.top(r.range()));
      for (const auto& d : typed_tuples(dom_cols)) {
        const int dom = in_domain(r, d);
        std::vector<int> row;
        for (int a : range) {
          auto t = d;
          t.push_back(a);
          const int g = fresh();
          require(c_.implies(g, c_.conj(dom, types_[static_cast<std::size_t>(r.range())].cells[static_cast<std::size_t>(a)])));
          m.cells[index(t)] = g;
          row.push_back(g);
        }
        if (r.multiplicity == Multiplicity::One || r.multiplicity == Multiplicity::Some)
          require(c_.implies(dom, c_.any(row)));
        if (r.multiplicity == Multiplicity::One || r.multiplicity == Multiplicity::Lone) at_most(row, 1);
      }
      rels_.push_back(std::move(m));
    }
  }

  void build_skolems() {
    for (const auto& s : p_.skolems) {
      std::vector<int> gates(static_cast<std::size_t>(n_), Circuit::kFalse);
      std::vector<int> choice;
      for (int a : atoms_of_top(h_.top(s.type))) {
        const int g = fresh();
        require(c_.implies(g, types_[static_cast<std::size_t>(s.type)].cells[static_cast<std::size_t>(a)]));
        gates[static_cast<std::size_t>(a)] = g;
        choice.push_back(g);
      }
      require(c_.any(choice));
      at_most(choice, 1);
      Matrix m = empty(1);
      m.cells = gates;
      env_.emplace_back(s.var, m);
      skolem_gates_.push_back(std::move(gates));
    }
  }

  const Matrix& lookup(int var) const {
    for (auto it = env_.rbegin(); it != env_.rend(); ++it) {
      if (it->first == var) return it->second;
    }
    throw Error(ErrorKind::Oracle, "unbound variable during grounding");
  }

  Matrix cellwise(const Matrix& a, const Matrix& b, RKind k) {
    Matrix r = empty(a.arity);
    for (std::size_t i = 0; i < r.cells.size(); ++i) {
      const int x = a.cells[i];
      const int y = b.cells[i];
      r.cells[i] = k == RKind::Union          ? c_.disj(x, y)
                   : k == RKind::Intersection ? c_.conj(x, y)
                                              : c_.conj(x, Circuit::negate(y));
    }
    return r;
  }

  Matrix join(const Matrix& a, const Matrix& b) {
    const int k = a.arity + b.arity - 2;
    Matrix r = empty(k);
    const std::size_t tail = power(b.arity - 1);
    const std::size_t heads = power(a.arity - 1);
    const auto n = static_cast<std::size_t>(n_);
    for (std::size_t pre = 0; pre < heads; ++pre) {
      for (std::size_t j = 0; j < tail; ++j) {
        int acc = Circuit::kFalse;
        for (std::size_t m = 0; m < n; ++m) {
          acc = c_.disj(acc, c_.conj(a.cells[pre * n + m], b.cells[m * tail + j]));
        }
        r.cells[pre * tail + j] = acc;
      }
    }
    return r;
  }

  Matrix product(const Matrix& a, const Matrix& b) {
    Matrix r = empty(a.arity + b.arity);
    const std::size_t scale = b.cells.size();
    for (std::size_t i = 0; i < a.cells.size(); ++i) {
      if (a.cells[i] == Circuit::kFalse) continue;
      for (std::size_t j = 0; j < scale; ++j) r.cells[i * scale + j] = c_.conj(a.cells[i], b.cells[j]);
    }
    return r;
  }

  Matrix closure(const Matrix& a) {
    Matrix r = a;
    for (int len = 1; len < n_; len *= 2) r = cellwise(r, join(r, r), RKind::Union);
    return r;
  }

  Matrix expr(const RExpr& e) {
    switch (e.kind) {
      case RKind::Type:
        return types_.at(static_cast<std::size_t>(e.id));
      case RKind::Relation:
        return rels_.at(static_cast<std::size_t>(e.id));
      case RKind::Var:
        return lookup(e.id);
      case RKind::Iden: {
        Matrix r = empty(2);
        const Matrix& t = types_.at(static_cast<std::size_t>(e.cols.at(0)));
        for (int a = 0; a < n_; ++a) r.cells[index({a, a})] = t.cells[static_cast<std::size_t>(a)];
        return r;
      }
      case RKind::Union:
      case RKind::Intersection:
      case RKind::Difference:
        return cellwise(expr(*e.args[0]), expr(*e.args[1]), e.kind);
      case RKind::Join:
        return join(expr(*e.args[0]), expr(*e.args[1]));
      case RKind::Product:
        return product(expr(*e.args[0]), expr(*e.args[1]));
      case RKind::Closure:
        return closure(expr(*e.args[0]));
      case RKind::Atom:
      case RKind::Call:
        break;
    }
    throw Error(ErrorKind::Oracle, "cannot ground '" + to_string(e) + "'", e.pos);
  }

  /// Gates for "at least one" and "at least two" of `gs`.
  std::pair<int, int> counts(const std::vector<int>& gs) {
    int one = Circuit::kFalse;
    int two = Circuit::kFalse;
    for (int g : gs) {
      two = c_.disj(two, c_.conj(one, g));
      one = c_.disj(one, g);
    }
    return {one, two};
  }

  int cardinality(Quantifier q, const std::vector<int>& gs) {
    const auto [one, two] = counts(gs);
    switch (q) {
      case Quantifier::Some:
        return one;
      case Quantifier::No:
        return Circuit::negate(one);
      case Quantifier::Lone:
        return Circuit::negate(two);
      case Quantifier::One:
        return c_.conj(one, Circuit::negate(two));
      case Quantifier::All:
        break;
    }
    throw Error(ErrorKind::Oracle, "'all' is not a cardinality test");
  }

  int formula(const RFormula& f) {
    switch (f.kind) {
      case FKind::True:
        return Circuit::kTrue;
      case FKind::False:
        return Circuit::kFalse;
      case FKind::Not:
        return Circuit::negate(formula(*f.kids[0]));
      case FKind::And: {
        int r = Circuit::kTrue;
        for (const auto& k : f.kids) r = c_.conj(r, formula(*k));
        return r;
      }
      case FKind::Or: {
        int r = Circuit::kFalse;
        for (const auto& k : f.kids) r = c_.disj(r, formula(*k));
        return r;
      }
      case FKind::Implies:
        return c_.implies(formula(*f.kids[0]), formula(*f.kids[1]));
      case FKind::Iff:
        return c_.iff(formula(*f.kids[0]), formula(*f.kids[1]));
      case FKind::Subset: {
        const Matrix a = expr(*f.a);
        const Matrix b = expr(*f.b);
        int r = Circuit::kTrue;
        for (std::size_t i = 0; i < a.cells.size(); ++i) r = c_.conj(r, c_.implies(a.cells[i], b.cells[i]));
        return r;
      }
      case FKind::Equal: {
        const Matrix a = expr(*f.a);
        const Matrix b = expr(*f.b);
        int r = Circuit::kTrue;
        for (std::size_t i = 0; i < a.cells.size(); ++i) r = c_.conj(r, c_.iff(a.cells[i], b.cells[i]));
        return r;
      }
      case FKind::Mult:
        return cardinality(f.quant, expr(*f.a).cells);
      case FKind::Quant: {
        const Matrix bound = expr(*f.a);
        std::vector<int> guard;
        std::vector<int> body;
        for (int a = 0; a < n_; ++a) {
          const int g = bound.cells[static_cast<std::size_t>(a)];
          if (g == Circuit::kFalse) continue;
          Matrix v = empty(1);
          v.cells[static_cast<std::size_t>(a)] = Circuit::kTrue;
          env_.emplace_back(f.var, std::move(v));
          const int b = formula(*f.kids[0]);
          env_.pop_back();
          guard.push_back(g);
          body.push_back(b);
        }
        if (f.quant == Quantifier::All) {
          int r = Circuit::kTrue;
          for (std::size_t i = 0; i < guard.size(); ++i) r = c_.conj(r, c_.implies(guard[i], body[i]));
          return r;
        }
        std::vector<int> hits;
        for (std::size_t i = 0; i < guard.size(); ++i) hits.push_back(c_.conj(guard[i], body[i]));
        return cardinality(f.quant, hits);
      }
      case FKind::Call:
        break;
    }
    throw Error(ErrorKind::Oracle, "cannot ground a predicate call", f.pos);
  }

  Counterexample extract() {
    std::vector<int> keep;  // old atom ids in order
    std::vector<int> renum(static_cast<std::size_t>(n_), -1);
    std::map<TypeId, int> per_top;
    Counterexample cx;
    for (int a = 0; a < n_; ++a) {
      const TypeId top = atom_top_[static_cast<std::size_t>(a)];
      if (!c_.value(types_[static_cast<std::size_t>(top)].cells[static_cast<std::size_t>(a)], solver_)) continue;
      renum[static_cast<std::size_t>(a)] = static_cast<int>(keep.size());
      keep.push_back(a);
      cx.instance.atom_names.push_back(h_.name(top) + "$" + std::to_string(per_top[top]++));
    }
    const int m = static_cast<int>(keep.size());
    cx.instance.atoms = m;
    for (const auto& t : types_) {
      TupleSet s(1, m);
      for (int a : keep) {
        if (c_.value(t.cells[static_cast<std::size_t>(a)], solver_)) s.insert({renum[static_cast<std::size_t>(a)]});
      }
      cx.instance.types.push_back(std::move(s));
    }
    for (std::size_t r = 0; r < rels_.size(); ++r) {
      TupleSet s(p_.relations[r].arity(), m);
      for (const auto& t : typed_tuples(p_.relations[r].columns)) {
        if (!c_.value(rels_[r].cells[index(t)], solver_)) continue;
        std::vector<int> mapped;
        for (int a : t) mapped.push_back(renum[static_cast<std::size_t>(a)]);
        s.insert(mapped);
      }
      cx.instance.relations.push_back(std::move(s));
    }
    for (const auto& gates : skolem_gates_) {
      int chosen = -1;
      for (int a = 0; a < n_; ++a) {
        if (gates[static_cast<std::size_t>(a)] != Circuit::kFalse && c_.value(gates[static_cast<std::size_t>(a)], solver_))
          chosen = renum[static_cast<std::size_t>(a)];
      }
      cx.skolem_atoms.push_back(chosen);
    }
    return cx;
  }
};

}  // namespace

OracleResult check_with_sat(const CheckProblem& p, const std::vector<int>& type_bounds) {
  return Grounder(p, type_bounds).run();
}

}  // namespace alloysmt
