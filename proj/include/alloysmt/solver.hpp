#pragma once

#include <optional>
#include <string>
#include <vector>

#include "alloysmt/finitization.hpp"
#include "alloysmt/oracle.hpp"
#include "alloysmt/translate.hpp"

namespace alloysmt {

enum class ScriptInput { Stdin, File };

struct SolverConfig {
  std::string executable = default_executable();
  /// Arguments before the script; with ScriptInput::File the script path is appended.
  std::vector<std::string> args = {"-in"};
  double timeout_seconds = 180;
  ScriptInput input = ScriptInput::Stdin;

  /// ALLOYSMT_SOLVER when set, else /usr/local/bin/z3.
  static std::string default_executable();
  /// Throws Error(Usage) when the time limit is not positive.
  void validate() const;
};

struct RawResult {
  std::string out;
  std::string err;
  int exit_status = 0;  // -1 when killed
  bool timed_out = false;
  double seconds = 0;
};

/// Runs the solver as a child process with the script on stdin or in a temporary file,
/// killing its process group at the time limit. Throws Error(Solver) when the executable
/// cannot be started.
RawResult run_solver(const std::string& script, const SolverConfig& config);

enum class Answer { Sat, Unsat, Unknown, Timeout };

struct ParsedResult {
  Answer answer = Answer::Unknown;
  std::optional<std::vector<smt::Term>> model;  // the get-model response, when present
};

/// Reads the verdict from the first output line and the model after it. Throws
/// Error(Solver) carrying the raw output when neither is readable.
ParsedResult parse_result(const RawResult& raw);

/// Maps a solver model back to a relational instance: the real atoms of each sort are its
/// elements other than the non-value, memberships and tuples follow the encoding.
Counterexample reconstruct(const CheckProblem& p, Translation& t, const std::vector<smt::Term>& model);

/// True when the oracle confirms facts and the negated assertion under the candidate.
/// Throws Error(Oracle) when the candidate mentions atoms outside its universe.
bool validate_counterexample(const Counterexample& c, const CheckProblem& p, std::string* why = nullptr);

enum class Outcome { Proven, Counterexample, BoundedNoCounterexample, Unknown, Timeout };

std::string to_string(Outcome o);

struct Verdict {
  Outcome outcome = Outcome::Unknown;
  double solver_seconds = 0;
  ScopePlan plan;                                // the exact bounds checked
  std::optional<Counterexample> counterexample;  // validated, or a false alarm under Unknown
  std::string detail;
};

/// Interprets a solver run of `t`'s script.
Verdict decide(const CheckProblem& p, Translation& t, const RawResult& raw);

/// Translate, run and decide.
Verdict check_with_solver(const CheckProblem& p, const ScopePlan& plan, const SolverConfig& config);

}  // namespace alloysmt
