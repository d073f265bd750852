#include "alloysmt/bench.hpp"

#include <atomic>
#include <filesystem>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "alloysmt/diagnostics.hpp"
#include "alloysmt/parser.hpp"

namespace alloysmt {

CheckProblem load_problem_file(const std::string& path, const std::string& assertion) {
  return build_problem(resolve_and_check(parse_file(path)), assertion);
}

double BenchRow::mean_solver_seconds() const {
  if (solver_seconds.empty()) return 0;
  return std::accumulate(solver_seconds.begin(), solver_seconds.end(), 0.0) / static_cast<double>(solver_seconds.size());
}

std::string tautology_label(Outcome o) {
  switch (o) {
    case Outcome::Proven:
      return "Yes";
    case Outcome::Counterexample:
      return "No";
    default:
      return "Don't know";
  }
}

Bounds oracle_bounds(const CheckProblem& p, const ScopePlan& plan, int n) {
  const auto& h = p.hierarchy;
  Bounds b;
  if (plan.unbounded()) {
    for (TypeId t : h.tops()) b[t] = n;
    return b;
  }
  for (TypeId t : h.tops()) b[t] = 2 * n;
  for (const auto& [t, tb] : plan.bounds) b[t] = n;
  return b;
}

bool disagree(Outcome solver, OracleOutcome oracle) {
  if (oracle == OracleOutcome::Refused) return false;
  const bool oracle_found = oracle == OracleOutcome::Counterexample;
  switch (solver) {
    case Outcome::Counterexample:
      return !oracle_found;
    case Outcome::Proven:
    case Outcome::BoundedNoCounterexample:
      return oracle_found;
    default:
      return false;
  }
}

namespace {

std::string bounds_text(const TypeHierarchy& h, const Bounds& b) {
  std::string out;
  for (const auto& [t, n] : b) out += (out.empty() ? "" : " ") + h.name(t) + "=" + std::to_string(n);
  return out;
}

std::string oracle_outcome_text(OracleOutcome o) {
  switch (o) {
    case OracleOutcome::Counterexample:
      return "counterexample";
    case OracleOutcome::NoCounterexample:
      return "no-counterexample";
    case OracleOutcome::Refused:
      return "refused";
  }
  return "refused";
}

BenchRow run_case(const BenchCase& c, const BenchOptions& options) {
  BenchRow row;
  row.model = std::filesystem::path(c.model_path).stem().string();
  row.assertion = c.assertion;
  row.scope = c.scope;
  try {
    const auto p = load_problem_file(c.model_path, c.assertion);
    const auto plan = plan_scopes(p, UserBounds{{}, c.scope});
    row.plan = plan.summary(p.hierarchy);
    for (const auto& [t, b] : plan.bounds) row.finitized.push_back(p.hierarchy.name(t));
    auto t = translate(p, plan);
    const auto text = t.text();
    for (int i = 0; i < std::max(1, options.repeat); ++i) {
      const auto raw = run_solver(text, options.solver);
      row.solver_seconds.push_back(raw.seconds);
      if (i > 0) {
        if (parse_result(raw).answer == Answer::Timeout) row.detail += (row.detail.empty() ? "" : "; ") + std::string("a repetition timed out");
        continue;
      }
      const auto v = decide(p, t, raw);
      row.verdict = v.outcome;
      row.detail = v.detail;
      if (v.counterexample) row.counterexample = render(p, *v.counterexample);
    }
    if (c.scope <= options.oracle_max_scope) {
      const auto bounds = oracle_bounds(p, plan, c.scope);
      const auto r = check_within_scope(p, bounds, options.oracle);
      OracleRun o;
      o.outcome = r.outcome;
      o.seconds = r.stats.seconds;
      o.strategy = r.stats.strategy;
      o.bounds = bounds_text(p.hierarchy, bounds);
      row.oracle = o;
      row.disagreement = disagree(row.verdict, r.outcome);
      if (row.disagreement) {
        row.detail += (row.detail.empty() ? "" : "; ") + std::string("oracle disagrees: solver ") + to_string(row.verdict) +
                      ", oracle " + oracle_outcome_text(r.outcome) + " at " + o.bounds;
        if (r.counterexample) row.detail += "\noracle counterexample:\n" + render(p, *r.counterexample);
      }
    }
  } catch (const Error& e) {
    row.error = e.what();
  }
  return row;
}

std::string seconds(double s) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(s < 0.1 ? 4 : 2) << s;
  return os.str();
}

}  // namespace

bool BenchReport::has_disagreement() const {
  return std::any_of(rows.begin(), rows.end(), [](const BenchRow& r) { return r.disagreement; });
}

std::string BenchReport::json() const {
  nlohmann::ordered_json out;
  out["solver"] = solver;
  out["timeout_seconds"] = timeout_seconds;
  out["repeat"] = repeat;
  out["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    nlohmann::ordered_json j;
    j["model"] = r.model;
    j["assertion"] = r.assertion;
    j["scope"] = r.scope;
    j["finitized"] = r.finitized;
    j["plan"] = r.plan;
    if (!r.error.empty()) {
      j["error"] = r.error;
    } else {
      j["verdict"] = to_string(r.verdict);
      j["tautology"] = tautology_label(r.verdict);
    }
    j["solver_seconds"] = r.solver_seconds;
    j["solver_mean_seconds"] = r.mean_solver_seconds();
    if (r.oracle) {
      j["oracle"] = {{"outcome", oracle_outcome_text(r.oracle->outcome)},
                     {"bounds", r.oracle->bounds},
                     {"strategy", r.oracle->strategy},
                     {"seconds", r.oracle->seconds}};
    } else {
      j["oracle"] = nullptr;
    }
    j["disagreement"] = r.disagreement;
    j["detail"] = r.detail;
    if (!r.counterexample.empty()) j["counterexample"] = r.counterexample;
    out["rows"].push_back(std::move(j));
  }
  return out.dump(2) + "\n";
}

std::string BenchReport::table() const {
  const std::vector<std::string> head = {"Model", "Assertion", "Scope", "Solver time (s)", "Oracle time (s)", "Tautology?"};
  std::vector<std::vector<std::string>> cells;
  for (const auto& r : rows) {
    std::string solver_time = r.error.empty() ? seconds(r.mean_solver_seconds()) : "error";
    if (r.error.empty() && r.verdict == Outcome::Timeout) solver_time = "time-out";
    std::string oracle_time = "-";
    if (r.oracle) oracle_time = r.oracle->outcome == OracleOutcome::Refused ? "refused" : seconds(r.oracle->seconds);
    const std::string scope = r.finitized.empty() ? std::to_string(r.scope) : "n = " + std::to_string(r.scope);
    std::string label = r.error.empty() ? tautology_label(r.verdict) : "-";
    if (r.disagreement) label += " (DISAGREES)";
    cells.push_back({r.model, r.assertion, scope, solver_time, oracle_time, label});
  }
  std::vector<std::size_t> width;
  for (std::size_t i = 0; i < head.size(); ++i) {
    width.push_back(head[i].size());
    for (const auto& row : cells) width[i] = std::max(width[i], row[i].size());
  }
  std::ostringstream os;
  const auto line = [&](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      os << (i ? " | " : "") << row[i] << std::string(width[i] - row[i].size(), ' ');
    }
    os << "\n";
  };
  line(head);
  std::vector<std::string> rule;
  for (auto w : width) rule.push_back(std::string(w, '-'));
  line(rule);
  std::string last_model;
  std::string last_assertion;
  for (auto row : cells) {
    // Repeated model and assertion names are blanked, as in a grouped table.
    const bool same_model = row[0] == last_model;
    const bool same_group = same_model && row[1] == last_assertion;
    last_model = row[0];
    last_assertion = row[1];
    if (same_model) row[0] = "";
    if (same_group) row[1] = "";
    line(row);
  }
  for (const auto& r : rows) {
    if (!r.error.empty()) os << "\n" << r.model << " " << r.assertion << " n=" << r.scope << ": " << r.error << "\n";
    if (r.disagreement) os << "\n" << r.model << " " << r.assertion << " n=" << r.scope << ": " << r.detail << "\n";
  }
  return os.str();
}

BenchReport run_bench(const std::vector<BenchCase>& cases, const BenchOptions& options) {
  options.solver.validate();
  if (options.repeat < 1) throw Error(ErrorKind::Usage, "--repeat must be at least 1");
  if (options.jobs < 1) throw Error(ErrorKind::Usage, "--jobs must be at least 1");
  BenchReport report;
  report.repeat = options.repeat;
  report.solver = options.solver.executable;
  report.timeout_seconds = options.solver.timeout_seconds;
  report.rows.resize(cases.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < cases.size(); i = next++) report.rows[i] = run_case(cases[i], options);
  };
  const auto n = std::min<std::size_t>(static_cast<std::size_t>(options.jobs), cases.size());
  std::vector<std::thread> pool;
  for (std::size_t i = 1; i < n; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return report;
}

}  // namespace alloysmt
