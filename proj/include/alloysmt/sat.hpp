#pragma once

#include <cstdint>
#include <vector>

namespace alloysmt::sat {

/// Conflict-driven clause-learning SAT solver: two watched literals, first-UIP learning,
/// activity-ordered decisions with phase saving, Luby restarts. Literals use the DIMACS
/// convention: variable v >= 1 is the literal v, its negation -v.
class Solver {
 public:
  int new_var();
  int num_vars() const { return static_cast<int>(assign_.size()); }
  std::size_t num_clauses() const { return clauses_.size(); }
  std::uint64_t conflicts() const { return conflicts_; }

  /// Adds a clause before solving. Duplicates and tautologies are handled.
  void add_clause(std::vector<int> lits);

  bool solve();
  /// Value of a variable in the model found by the last successful solve.
  bool value(int var) const;

 private:
  std::vector<std::vector<int>> clauses_;   // internal literals: 2*v + sign
  std::vector<std::vector<int>> watches_;   // by literal: clauses watching its negation
  std::vector<std::int8_t> assign_;         // by variable: -1 unassigned, 0, 1
  std::vector<int> level_;
  std::vector<int> reason_;                 // clause index or -1
  std::vector<std::int8_t> phase_;
  std::vector<double> activity_;
  std::vector<int> heap_;                   // binary max-heap of variables by activity
  std::vector<int> heap_pos_;
  std::vector<int> trail_;
  std::vector<int> trail_lim_;
  std::vector<std::int8_t> seen_;
  std::size_t qhead_ = 0;
  double bump_ = 1.0;
  bool unsat_ = false;
  std::uint64_t conflicts_ = 0;
  std::vector<std::int8_t> model_;

  int lit_value(int lit) const;
  void enqueue(int lit, int reason);
  int propagate();
  void attach(int ci);
  void analyze(int confl, std::vector<int>& learnt, int& back_level);
  void backtrack(int level);
  int decision_level() const { return static_cast<int>(trail_lim_.size()); }
  void bump(int var);
  void heap_up(int i);
  void heap_down(int i);
  void heap_insert(int var);
  int heap_pop();
};

}  // namespace alloysmt::sat
