// Command-line entry point: translate, check, oracle and bench.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "alloysmt/bench.hpp"
#include "alloysmt/diagnostics.hpp"
#include "alloysmt/parser.hpp"
#include "alloysmt/solver.hpp"

using namespace alloysmt;

namespace {

// Exit codes.
constexpr int kOk = 0;              // proven, bounded-no-counterexample, no oracle counterexample
constexpr int kCounterexample = 1;  // also bench disagreements
constexpr int kUndecided = 2;       // unknown, timeout, oracle refusal, solver failure
constexpr int kUsage = 3;           // usage, parse, type, scope and translation errors

struct Common {
  std::string file;
  std::string assertion;
  std::vector<std::string> bounds;  // T=n
  std::optional<int> scope;
};

struct SolverFlags {
  std::string path = SolverConfig::default_executable();
  std::vector<std::string> args;
  double timeout = 180;
  bool file_input = false;

  SolverConfig config() const {
    SolverConfig c;
    c.executable = path;
    if (!args.empty()) c.args = args;
    if (file_input) {
      c.input = ScriptInput::File;
      if (args.empty()) c.args.clear();
    }
    c.timeout_seconds = timeout;
    return c;
  }
};

void add_common(CLI::App* cmd, Common& c, bool assertion_required) {
  cmd->add_option("file", c.file, "Model file (.als)")->required()->check(CLI::ExistingFile);
  auto* a = cmd->add_option("assertion", c.assertion, "Assertion to check");
  if (assertion_required) a->required();
  cmd->add_option("--bound", c.bounds, "Bound a type: T=n (repeatable)");
  cmd->add_option("--scope", c.scope, "Default bound for types that need one");
}

void add_solver(CLI::App* cmd, SolverFlags& s) {
  cmd->add_option("--solver", s.path, "Solver executable (default: $ALLOYSMT_SOLVER or /usr/local/bin/z3)");
  cmd->add_option("--solver-arg", s.args, "Solver argument (repeatable; default -in)")->allow_extra_args(false);
  cmd->add_option("--timeout", s.timeout, "Solver time limit in seconds")->check(CLI::PositiveNumber);
  cmd->add_flag("--script-file", s.file_input, "Pass the script as a file argument instead of on stdin");
}

UserBounds user_bounds(const Common& c) {
  UserBounds u;
  for (const auto& b : c.bounds) {
    const auto eq = b.find('=');
    if (eq == std::string::npos || eq == 0) throw Error(ErrorKind::Usage, "--bound expects T=n, got '" + b + "'");
    try {
      std::size_t used = 0;
      const int n = std::stoi(b.substr(eq + 1), &used);
      if (used != b.size() - eq - 1) throw std::invalid_argument(b);
      u.types[b.substr(0, eq)] = n;
    } catch (const std::logic_error&) {
      throw Error(ErrorKind::Usage, "--bound expects T=n, got '" + b + "'");
    }
  }
  u.scope = c.scope;
  return u;
}

/// Flags first; without any, the `check ... for n` clause of the model.
UserBounds effective_bounds(const Common& c, const CheckProblem& p) {
  auto u = user_bounds(c);
  if (u.types.empty() && !u.scope) u.scope = p.scope;
  return u;
}

std::string default_assertion(const SourceModel& m) {
  for (const auto& para : m.paragraphs) {
    if (const auto* cmd = std::get_if<CheckCmd>(&para)) return cmd->assertion;
  }
  const auto names = m.assertion_names();
  if (names.empty()) throw Error(ErrorKind::Usage, "the model has no assertion");
  return names.front();
}

CheckProblem load(Common& c) {
  const auto src = parse_file(c.file);
  if (c.assertion.empty()) c.assertion = default_assertion(src);
  return build_problem(resolve_and_check(src), c.assertion);
}

void write_out(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Usage, "cannot write " + path);
  out << text;
}

int exit_code(Outcome o) {
  switch (o) {
    case Outcome::Proven:
    case Outcome::BoundedNoCounterexample:
      return kOk;
    case Outcome::Counterexample:
      return kCounterexample;
    default:
      return kUndecided;
  }
}

int cmd_translate(Common& c, const std::string& out) {
  const auto p = load(c);
  const auto plan = plan_scopes(p, user_bounds(c));
  const auto t = translate(p, plan);
  write_out(out, t.text());
  std::cerr << p.assertion << ": " << plan.summary(p.hierarchy) << "\n";
  return kOk;
}

int cmd_check(Common& c, const SolverFlags& s) {
  const auto p = load(c);
  const auto plan = plan_scopes(p, effective_bounds(c, p));
  std::cout << p.assertion << ": " << plan.summary(p.hierarchy) << "\n";
  const auto v = check_with_solver(p, plan, s.config());
  std::cout << "verdict: " << to_string(v.outcome) << " (" << tautology_label(v.outcome) << ")\n";
  std::cout << "solver time: " << v.solver_seconds << " s\n";
  if (!v.detail.empty()) std::cout << "detail: " << v.detail << "\n";
  if (v.counterexample) {
    std::cout << (v.outcome == Outcome::Counterexample ? "counterexample:\n" : "unvalidated candidate:\n")
              << render(p, *v.counterexample);
  }
  return exit_code(v.outcome);
}

int cmd_oracle(Common& c, const std::string& strategy, double ceiling) {
  const auto p = load(c);
  const auto u = effective_bounds(c, p);
  const auto& h = p.hierarchy;
  Bounds bounds;
  for (const auto& [name, n] : u.types) {
    const auto t = h.find(name);
    if (!t) throw Error(ErrorKind::Usage, "unknown type " + name + " in --bound");
    if (n < 0) throw Error(ErrorKind::Usage, "bound for " + name + " must not be negative");
    bounds[*t] = n;
  }
  for (TypeId t : h.tops()) {
    if (bounds.count(t)) continue;
    if (!u.scope) throw Error(ErrorKind::Usage, "the oracle needs a bound for " + h.name(t) + "; pass --scope n");
    bounds[t] = *u.scope;
  }
  OracleOptions o;
  o.ceiling = ceiling;
  if (strategy == "enumerate") o.strategy = OracleStrategy::Enumerate;
  if (strategy == "sat") o.strategy = OracleStrategy::Sat;
  const auto r = check_within_scope(p, bounds, o);
  std::cout << p.assertion << ": oracle within";
  for (const auto& [t, n] : bounds) std::cout << " " << h.name(t) << "=" << n;
  std::cout << "\n";
  std::cout << "strategy: " << r.stats.strategy << ", " << r.stats.seconds << " s\n";
  switch (r.outcome) {
    case OracleOutcome::Counterexample:
      std::cout << "verdict: counterexample\n" << render(p, *r.counterexample);
      return kCounterexample;
    case OracleOutcome::NoCounterexample:
      std::cout << "verdict: no counterexample\n";
      return kOk;
    case OracleOutcome::Refused:
      std::cout << "verdict: refused (" << r.detail << ")\n";
      return kUndecided;
  }
  return kUndecided;
}

std::vector<std::string> assertions_of(const std::string& path) {
  return parse_file(path).assertion_names();
}

int cmd_bench(const std::string& corpus, std::vector<std::string> models, const std::vector<std::string>& assertions,
              std::vector<int> scopes, const BenchOptions& options, const std::string& out) {
  if (models.empty()) {
    for (const std::string m : {"basic", "hierarchical", "acyclic"}) models.push_back(m);
  }
  if (scopes.empty()) scopes = {2};
  std::vector<BenchCase> cases;
  for (const auto& m : models) {
    std::string path = m;
    if (!std::filesystem::exists(path)) path = (std::filesystem::path(corpus) / (m + ".als")).string();
    if (!std::filesystem::exists(path)) throw Error(ErrorKind::Usage, "no model " + m + " (looked for " + path + ")");
    for (const auto& a : assertions.empty() ? assertions_of(path) : assertions) {
      for (int n : scopes) cases.push_back(BenchCase{path, a, n});
    }
  }
  const auto report = run_bench(cases, options);
  std::cout << report.table();
  if (!out.empty()) write_out(out, report.json());
  for (const auto& r : report.rows) {
    if (!r.error.empty()) return kUsage;
  }
  return report.has_disagreement() ? kCounterexample : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Translate Alloy models to SMT-LIB and check assertions with an external solver"};
  app.require_subcommand(1);

  Common tc;
  std::string translate_out;
  auto* translate_cmd = app.add_subcommand("translate", "Emit the SMT-LIB script of an assertion");
  add_common(translate_cmd, tc, false);
  translate_cmd->add_option("--out", translate_out, "Output file (default stdout)");

  Common cc;
  SolverFlags cs;
  auto* check_cmd = app.add_subcommand("check", "Check an assertion with the solver");
  add_common(check_cmd, cc, true);
  add_solver(check_cmd, cs);

  Common oc;
  std::string strategy = "auto";
  double ceiling = OracleOptions{}.ceiling;
  auto* oracle_cmd = app.add_subcommand("oracle", "Search for a counterexample by bounded enumeration");
  add_common(oracle_cmd, oc, true);
  oracle_cmd->add_option("--strategy", strategy, "auto, enumerate or sat")
      ->check(CLI::IsMember({"auto", "enumerate", "sat"}));
  oracle_cmd->add_option("--ceiling", ceiling, "Largest state space to enumerate");

  std::string corpus = ALLOYSMT_CORPUS_DIR;
  std::vector<std::string> models;
  std::vector<std::string> bench_assertions;
  std::vector<int> scopes;
  SolverFlags bs;
  BenchOptions bo;
  std::string bench_out;
  auto* bench_cmd = app.add_subcommand("bench", "Run the corpus and cross-check the oracle");
  bench_cmd->add_option("--corpus", corpus, "Directory of model files");
  bench_cmd->add_option("--model", models, "Model name or file (repeatable; default all three)");
  bench_cmd->add_option("--assertion", bench_assertions, "Assertion (repeatable; default all)");
  bench_cmd->add_option("--scope", scopes, "Scope n (repeatable; default 2)")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--repeat", bo.repeat, "Solver runs per combination")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--jobs", bo.jobs, "Combinations run concurrently")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--oracle-max", bo.oracle_max_scope, "Largest scope checked by the oracle");
  bench_cmd->add_option("--out", bench_out, "JSON report file");
  add_solver(bench_cmd, bs);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*translate_cmd) return cmd_translate(tc, translate_out);
    if (*check_cmd) return cmd_check(cc, cs);
    if (*oracle_cmd) return cmd_oracle(oc, strategy, ceiling);
    if (*bench_cmd) {
      bo.solver = bs.config();
      return cmd_bench(corpus, models, bench_assertions, scopes, bo, bench_out);
    }
  } catch (const Error& e) {
    std::cerr << "alloysmt: " << e.what() << "\n";
    return e.kind() == ErrorKind::Solver ? kUndecided : kUsage;
  }
  return kUsage;
}
