#include "alloysmt/sat.hpp"

#include <algorithm>
#include <stdexcept>

namespace alloysmt::sat {

namespace {

int to_internal(int lit) {
  if (lit == 0) throw std::invalid_argument("literal 0");
  const int v = (lit > 0 ? lit : -lit) - 1;
  return 2 * v + (lit < 0 ? 1 : 0);
}

int var_of(int lit) { return lit >> 1; }
int neg(int lit) { return lit ^ 1; }

double luby(double y, int x) {
  int size = 1;
  int seq = 0;
  while (size < x + 1) {
    ++seq;
    size = 2 * size + 1;
  }
  while (size - 1 != x) {
    size = (size - 1) >> 1;
    --seq;
    x = x % size;
  }
  double r = 1;
  for (int i = 0; i < seq; ++i) r *= y;
  return r;
}

}  // namespace

int Solver::new_var() {
  const int v = num_vars();
  assign_.push_back(-1);
  level_.push_back(0);
  reason_.push_back(-1);
  phase_.push_back(0);
  activity_.push_back(0);
  heap_pos_.push_back(-1);
  seen_.push_back(0);
  watches_.emplace_back();
  watches_.emplace_back();
  heap_insert(v);
  return v + 1;
}

int Solver::lit_value(int lit) const {
  const int a = assign_[static_cast<std::size_t>(var_of(lit))];
  if (a < 0) return -1;
  return (lit & 1) ? 1 - a : a;
}

void Solver::enqueue(int lit, int reason) {
  const auto v = static_cast<std::size_t>(var_of(lit));
  assign_[v] = static_cast<std::int8_t>((lit & 1) ? 0 : 1);
  level_[v] = decision_level();
  reason_[v] = reason;
  trail_.push_back(lit);
}

void Solver::attach(int ci) {
  const auto& c = clauses_[static_cast<std::size_t>(ci)];
  watches_[static_cast<std::size_t>(neg(c[0]))].push_back(ci);
  watches_[static_cast<std::size_t>(neg(c[1]))].push_back(ci);
}

void Solver::add_clause(std::vector<int> lits) {
  if (unsat_) return;
  for (int& l : lits) {
    const int v = (l > 0 ? l : -l);
    if (v > num_vars()) throw std::invalid_argument("clause mentions an undeclared variable");
    l = to_internal(l);
  }
  std::sort(lits.begin(), lits.end());
  lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
  std::vector<int> kept;
  for (std::size_t i = 0; i < lits.size(); ++i) {
    if (i + 1 < lits.size() && lits[i + 1] == neg(lits[i])) return;  // tautology
    const int val = lit_value(lits[i]);
    if (val == 1) return;  // satisfied at level 0
    if (val == 0) continue;
    kept.push_back(lits[i]);
  }
  if (kept.empty()) {
    unsat_ = true;
    return;
  }
  if (kept.size() == 1) {
    enqueue(kept[0], -1);
    if (propagate() >= 0) unsat_ = true;
    return;
  }
  clauses_.push_back(std::move(kept));
  attach(static_cast<int>(clauses_.size()) - 1);
}

int Solver::propagate() {
  while (qhead_ < trail_.size()) {
    const int p = trail_[qhead_++];
    const int falsified = neg(p);
    auto& ws = watches_[static_cast<std::size_t>(p)];
    std::size_t keep = 0;
    for (std::size_t i = 0; i < ws.size(); ++i) {
      const int ci = ws[i];
      auto& c = clauses_[static_cast<std::size_t>(ci)];
      if (c[0] == falsified) std::swap(c[0], c[1]);
      if (lit_value(c[0]) == 1) {
        ws[keep++] = ci;
        continue;
      }
      bool moved = false;
      for (std::size_t k = 2; k < c.size(); ++k) {
        if (lit_value(c[k]) != 0) {
          std::swap(c[1], c[k]);
          watches_[static_cast<std::size_t>(neg(c[1]))].push_back(ci);
          moved = true;
          break;
        }
      }
      if (moved) continue;
      ws[keep++] = ci;
      if (lit_value(c[0]) == 0) {
        for (std::size_t j = i + 1; j < ws.size(); ++j) ws[keep++] = ws[j];
        ws.resize(keep);
        qhead_ = trail_.size();
        return ci;
      }
      enqueue(c[0], ci);
    }
    ws.resize(keep);
  }
  return -1;
}

void Solver::bump(int var) {
  auto& a = activity_[static_cast<std::size_t>(var)];
  a += bump_;
  if (a > 1e100) {
    for (auto& x : activity_) x *= 1e-100;
    bump_ *= 1e-100;
  }
  if (heap_pos_[static_cast<std::size_t>(var)] >= 0) heap_up(heap_pos_[static_cast<std::size_t>(var)]);
}

void Solver::analyze(int confl, std::vector<int>& learnt, int& back_level) {
  learnt.assign(1, -1);
  int path = 0;
  int p = -1;
  std::size_t idx = trail_.size();
  do {
    const auto& c = clauses_[static_cast<std::size_t>(confl)];
    for (std::size_t j = (p < 0 ? 0 : 1); j < c.size(); ++j) {
      const int q = c[j];
      const auto v = static_cast<std::size_t>(var_of(q));
      if (seen_[v] || level_[v] == 0) continue;
      seen_[v] = 1;
      bump(var_of(q));
      if (level_[v] == decision_level()) {
        ++path;
      } else {
        learnt.push_back(q);
      }
    }
    do {
      --idx;
    } while (!seen_[static_cast<std::size_t>(var_of(trail_[idx]))]);
    p = trail_[idx];
    confl = reason_[static_cast<std::size_t>(var_of(p))];
    seen_[static_cast<std::size_t>(var_of(p))] = 0;
    --path;
  } while (path > 0);
  learnt[0] = neg(p);
  back_level = 0;
  std::size_t max_i = 1;
  for (std::size_t i = 1; i < learnt.size(); ++i) {
    const int l = level_[static_cast<std::size_t>(var_of(learnt[i]))];
    if (l > back_level) {
      back_level = l;
      max_i = i;
    }
  }
  if (learnt.size() > 1) std::swap(learnt[1], learnt[max_i]);
  for (int l : learnt) seen_[static_cast<std::size_t>(var_of(l))] = 0;
  bump_ /= 0.95;
}

void Solver::backtrack(int level) {
  if (decision_level() <= level) return;
  const auto stop = static_cast<std::size_t>(trail_lim_[static_cast<std::size_t>(level)]);
  for (std::size_t i = trail_.size(); i-- > stop;) {
    const auto v = static_cast<std::size_t>(var_of(trail_[i]));
    phase_[v] = assign_[v];
    assign_[v] = -1;
    reason_[v] = -1;
    if (heap_pos_[v] < 0) heap_insert(static_cast<int>(v));
  }
  trail_.resize(stop);
  trail_lim_.resize(static_cast<std::size_t>(level));
  qhead_ = trail_.size();
}

bool Solver::solve() {
  if (unsat_) return false;
  if (propagate() >= 0) {
    unsat_ = true;
    return false;
  }
  int restart = 0;
  std::vector<int> learnt;
  while (true) {
    const double budget = 100 * luby(2, restart++);
    std::uint64_t local = 0;
    while (true) {
      const int confl = propagate();
      if (confl >= 0) {
        ++conflicts_;
        ++local;
        if (decision_level() == 0) {
          unsat_ = true;
          return false;
        }
        int back = 0;
        analyze(confl, learnt, back);
        backtrack(back);
        if (learnt.size() == 1) {
          enqueue(learnt[0], -1);
        } else {
          clauses_.push_back(learnt);
          const int ci = static_cast<int>(clauses_.size()) - 1;
          attach(ci);
          enqueue(learnt[0], ci);
        }
        continue;
      }
      if (static_cast<double>(local) >= budget) {
        backtrack(0);
        break;
      }
      int next = -1;
      while (!heap_.empty()) {
        const int v = heap_pop();
        if (assign_[static_cast<std::size_t>(v)] < 0) {
          next = v;
          break;
        }
      }
      if (next < 0) {
        model_ = assign_;
        backtrack(0);
        return true;
      }
      trail_lim_.push_back(static_cast<int>(trail_.size()));
      enqueue(2 * next + (phase_[static_cast<std::size_t>(next)] == 1 ? 0 : 1), -1);
    }
  }
}

bool Solver::value(int var) const {
  if (var < 1 || static_cast<std::size_t>(var) > model_.size()) throw std::out_of_range("no model value");
  return model_[static_cast<std::size_t>(var - 1)] == 1;
}

void Solver::heap_up(int i) {
  const int v = heap_[static_cast<std::size_t>(i)];
  const double a = activity_[static_cast<std::size_t>(v)];
  while (i > 0) {
    const int parent = (i - 1) / 2;
    const int pv = heap_[static_cast<std::size_t>(parent)];
    if (activity_[static_cast<std::size_t>(pv)] >= a) break;
    heap_[static_cast<std::size_t>(i)] = pv;
    heap_pos_[static_cast<std::size_t>(pv)] = i;
    i = parent;
  }
  heap_[static_cast<std::size_t>(i)] = v;
  heap_pos_[static_cast<std::size_t>(v)] = i;
}

void Solver::heap_down(int i) {
  const int n = static_cast<int>(heap_.size());
  const int v = heap_[static_cast<std::size_t>(i)];
  const double a = activity_[static_cast<std::size_t>(v)];
  while (true) {
    int child = 2 * i + 1;
    if (child >= n) break;
    if (child + 1 < n && activity_[static_cast<std::size_t>(heap_[static_cast<std::size_t>(child + 1)])] >
                             activity_[static_cast<std::size_t>(heap_[static_cast<std::size_t>(child)])])
      ++child;
    const int cv = heap_[static_cast<std::size_t>(child)];
    if (activity_[static_cast<std::size_t>(cv)] <= a) break;
    heap_[static_cast<std::size_t>(i)] = cv;
    heap_pos_[static_cast<std::size_t>(cv)] = i;
    i = child;
  }
  heap_[static_cast<std::size_t>(i)] = v;
  heap_pos_[static_cast<std::size_t>(v)] = i;
}

void Solver::heap_insert(int var) {
  heap_.push_back(var);
  heap_pos_[static_cast<std::size_t>(var)] = static_cast<int>(heap_.size()) - 1;
  heap_up(static_cast<int>(heap_.size()) - 1);
}

int Solver::heap_pop() {
  const int top = heap_.front();
  heap_pos_[static_cast<std::size_t>(top)] = -1;
  const int last = heap_.back();
  heap_.pop_back();
  if (!heap_.empty()) {
    heap_[0] = last;
    heap_pos_[static_cast<std::size_t>(last)] = 0;
    heap_down(0);
  }
  return top;
}

}  // namespace alloysmt::sat
