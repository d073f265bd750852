#pragma once

#include <optional>
#include <string>
#include <vector>

#include "alloysmt/oracle.hpp"
#include "alloysmt/solver.hpp"

namespace alloysmt {

/// One (model, assertion, scope) combination.
struct BenchCase {
  std::string model_path;
  std::string assertion;
  int scope = 2;
};

struct BenchOptions {
  SolverConfig solver;
  int repeat = 3;
  int jobs = 1;
  /// The oracle runs only for scopes up to this value.
  int oracle_max_scope = 3;
  OracleOptions oracle;
};

struct OracleRun {
  OracleOutcome outcome = OracleOutcome::NoCounterexample;
  double seconds = 0;
  std::string strategy;
  std::string bounds;  // e.g. "Book=2 Name=2 Target=4"
};

struct BenchRow {
  std::string model;  // file stem
  std::string assertion;
  int scope = 0;
  std::string plan;                    // plan summary
  std::vector<std::string> finitized;  // names of bounded types
  Outcome verdict = Outcome::Unknown;
  std::vector<double> solver_seconds;  // one per repetition
  std::optional<OracleRun> oracle;
  bool disagreement = false;
  std::string detail;
  std::string counterexample;  // rendered, when one was found
  std::string error;           // pipeline error instead of a verdict

  double mean_solver_seconds() const;
};

/// "Yes" for proofs, "No" for validated counterexamples, "Don't know" otherwise.
std::string tautology_label(Outcome o);

/// Oracle bounds mirroring the Alloy commands used for comparison: with no finitized
/// types every type gets n; otherwise the finitized types get n and the other top-level
/// types 2n, as in `for 2n but n Book, n Name`.
Bounds oracle_bounds(const CheckProblem& p, const ScopePlan& plan, int n);

/// True when a solver outcome and an oracle outcome contradict each other. Unknown,
/// timeout and refused outcomes never disagree.
bool disagree(Outcome solver, OracleOutcome oracle);

struct BenchReport {
  std::vector<BenchRow> rows;
  int repeat = 0;
  std::string solver;
  double timeout_seconds = 0;

  bool has_disagreement() const;
  /// Machine-readable form: one object with a `rows` array.
  std::string json() const;
  /// Human table: model, assertion, scope, mean solver time, oracle time and Tautology?.
  std::string table() const;
};

/// Runs every case, up to `jobs` at a time. Rows keep the order of `cases`.
BenchReport run_bench(const std::vector<BenchCase>& cases, const BenchOptions& options);

/// Loads one assertion of a model file.
CheckProblem load_problem_file(const std::string& path, const std::string& assertion);

}  // namespace alloysmt
