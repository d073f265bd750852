#include <gtest/gtest.h>

#include <sys/stat.h>
#include <unistd.h>

#include <chrono>
#include <filesystem>
#include <fstream>

#include "alloysmt/diagnostics.hpp"
#include "alloysmt/solver.hpp"
#include "corpus.hpp"

using namespace alloysmt;
using testing_support::load_problem;

namespace {

bool have_solver() { return access(SolverConfig::default_executable().c_str(), X_OK) == 0; }

#define REQUIRE_SOLVER() \
  if (!have_solver()) GTEST_SKIP() << "no solver at " << SolverConfig::default_executable()

std::filesystem::path fake_dir() {
  return std::filesystem::temp_directory_path() / ("alloysmt-fake-" + std::to_string(getpid()));
}

/// Removes the fake solvers once every test has run.
struct FakeDirCleanup : ::testing::Environment {
  void TearDown() override {
    std::error_code ec;
    std::filesystem::remove_all(fake_dir(), ec);
  }
};
const auto* const kCleanup = ::testing::AddGlobalTestEnvironment(new FakeDirCleanup);

/// Writes an executable shell script and returns its path.
std::string fake_solver(const std::string& name, const std::string& body) {
  const auto dir = fake_dir();
  std::filesystem::create_directories(dir);
  const auto path = (dir / name).string();
  std::ofstream(path) << "#!/bin/sh\n" << body << "\n";
  chmod(path.c_str(), 0755);
  return path;
}

SolverConfig fake_config(const std::string& path, double timeout = 10) {
  SolverConfig c;
  c.executable = path;
  c.args = {};
  c.timeout_seconds = timeout;
  return c;
}

CheckProblem with_goal(CheckProblem p, RFormulaPtr goal) {
  p.goal = std::move(goal);
  return p;
}

}  // namespace

// ---- process control --------------------------------------------------------------

TEST(Run, CapturesOutputAndExitStatus) {
  const auto path = fake_solver("echo", "cat >/dev/null; echo unsat; echo note >&2; exit 3");
  const auto r = run_solver("(check-sat)", fake_config(path));
  EXPECT_EQ(r.out, "unsat\n");
  EXPECT_EQ(r.err, "note\n");
  EXPECT_EQ(r.exit_status, 3);
  EXPECT_FALSE(r.timed_out);
}

TEST(Run, ScriptArrivesOnStdinOrAsFile) {
  const auto path = fake_solver("cat", "if [ $# -gt 0 ]; then cat \"$1\"; else cat; fi");
  auto config = fake_config(path);
  EXPECT_EQ(run_solver("(hello)", config).out, "(hello)");
  config.input = ScriptInput::File;
  EXPECT_EQ(run_solver("(hello)", config).out, "(hello)");
}

TEST(Run, SleepingSolverTimesOutWithinTheLimit) {
  const auto path = fake_solver("sleep", "sleep 100");
  const auto start = std::chrono::steady_clock::now();
  const auto r = run_solver("(check-sat)", fake_config(path, 1));
  const double took = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  EXPECT_TRUE(r.timed_out);
  EXPECT_LT(took, 1 + 2);
  const auto p = load_problem("basic", "delUndoesAdd");
  auto t = translate(p, plan_scopes(p, {}));
  EXPECT_EQ(decide(p, t, r).outcome, Outcome::Timeout);
}

TEST(Run, MissingExecutableIsASolverError) {
  try {
    run_solver("(check-sat)", fake_config("/nonexistent/solver"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Solver);
    EXPECT_NE(e.message().find("/nonexistent/solver"), std::string::npos);
  }
}

TEST(Run, NonPositiveTimeoutIsRejected) {
  SolverConfig c;
  c.timeout_seconds = 0;
  EXPECT_THROW(c.validate(), Error);
}

// ---- parsing ------------------------------------------------------------------------

TEST(Parse, Verdicts) {
  EXPECT_EQ(parse_result({"unsat\n", "", 0, false, 0}).answer, Answer::Unsat);
  EXPECT_EQ(parse_result({"sat\n(\n(define-fun c () Int 1)\n)\n", "", 0, false, 0}).answer, Answer::Sat);
  const auto u = parse_result({"unknown\n(error \"model is not available\")\n", "", 1, false, 0});
  EXPECT_EQ(u.answer, Answer::Unknown);
  EXPECT_FALSE(u.model);
  EXPECT_EQ(parse_result({"", "", -1, true, 0}).answer, Answer::Timeout);
}

TEST(Parse, GarbageAndMalformedModelsAreErrors) {
  EXPECT_THROW(parse_result({"Segmentation fault\n", "", 139, false, 0}), Error);
  EXPECT_THROW(parse_result({"", "boom", 1, false, 0}), Error);
  try {
    parse_result({"sat\n((define-fun c () T\n", "", 0, false, 0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(e.message().find("define-fun c"), std::string::npos) << "raw output is carried";
  }
  EXPECT_THROW(parse_result({"sat\n(error \"no model\")\n", "", 0, false, 0}), Error);
}

TEST(Decide, UnsatMeansProvenOnlyWithoutBounds) {
  const auto path = fake_solver("unsat", "cat >/dev/null; echo unsat");
  const auto p = load_problem("acyclic", "delUndoesAdd");
  const auto v = check_with_solver(p, plan_scopes(p, {{}, 2}), fake_config(path));
  EXPECT_EQ(v.outcome, Outcome::BoundedNoCounterexample);
  EXPECT_FALSE(v.plan.unbounded());
  const auto q = load_problem("basic", "delUndoesAdd");
  EXPECT_EQ(check_with_solver(q, plan_scopes(q, {}), fake_config(path)).outcome, Outcome::Proven);
}

TEST(Decide, BareUnknownIsUnknown) {
  const auto path = fake_solver("unknown", "cat >/dev/null; echo unknown");
  const auto p = load_problem("basic", "addLocal");
  const auto v = check_with_solver(p, plan_scopes(p, {}), fake_config(path));
  EXPECT_EQ(v.outcome, Outcome::Unknown);
  EXPECT_FALSE(v.counterexample);
}

// ---- against the real solver ------------------------------------------------------

TEST(Solve, BasicDelUndoesAddIsProven) {
  REQUIRE_SOLVER();
  const auto p = load_problem("basic", "delUndoesAdd");
  const auto v = check_with_solver(p, plan_scopes(p, {}), SolverConfig{});
  EXPECT_EQ(v.outcome, Outcome::Proven) << v.detail;
}

TEST(Solve, HierarchicalAddLocalCounterexampleValidates) {
  REQUIRE_SOLVER();
  const auto p = load_problem("hierarchical", "addLocal");
  const auto v = check_with_solver(p, plan_scopes(p, {{{"Book", 2}, {"Name", 2}}, std::nullopt}), SolverConfig{});
  ASSERT_EQ(v.outcome, Outcome::Counterexample) << v.detail;
  ASSERT_TRUE(v.counterexample);
  EXPECT_TRUE(validate_counterexample(*v.counterexample, p));
  // Swapping n and n' breaks it: n != n' still holds but the update is at the wrong name.
  auto swapped = *v.counterexample;
  std::size_t n = 0, n2 = 0;
  for (std::size_t i = 0; i < p.skolems.size(); ++i) {
    if (p.skolems[i].name == "n") n = i;
    if (p.skolems[i].name == "n'") n2 = i;
  }
  std::swap(swapped.skolem_atoms[n], swapped.skolem_atoms[n2]);
  std::string why;
  EXPECT_FALSE(validate_counterexample(swapped, p, &why));
  EXPECT_FALSE(why.empty());
}

TEST(Solve, EmptyRelationsCandidateFails) {
  REQUIRE_SOLVER();
  const auto p = load_problem("hierarchical", "addLocal");
  const auto v = check_with_solver(p, plan_scopes(p, {{}, 2}), SolverConfig{});
  ASSERT_TRUE(v.counterexample);
  auto empty = *v.counterexample;
  for (auto& r : empty.instance.relations) r.clear();
  EXPECT_FALSE(validate_counterexample(empty, p));
}

TEST(Solve, AtomsOutsideTheUniverseAreRejected) {
  REQUIRE_SOLVER();
  const auto p = load_problem("hierarchical", "addLocal");
  const auto v = check_with_solver(p, plan_scopes(p, {{}, 2}), SolverConfig{});
  ASSERT_TRUE(v.counterexample);
  auto bad = *v.counterexample;
  bad.skolem_atoms[0] = bad.instance.atoms + 5;
  EXPECT_THROW(validate_counterexample(bad, p), Error);
}

TEST(Solve, ModelOfAnotherGoalIsAFalseAlarm) {
  REQUIRE_SOLVER();
  // A model where the assertion holds, read back as if it refuted the assertion.
  const auto p = load_problem("basic", "delUndoesAdd");
  const auto holds = with_goal(p, ir::negate(p.goal));
  auto t = translate(holds, plan_scopes(holds, {}));
  const auto raw = run_solver(t.text(), SolverConfig{});
  ASSERT_EQ(parse_result(raw).answer, Answer::Sat);
  auto real = translate(p, plan_scopes(p, {}));
  const auto v = decide(p, real, raw);
  EXPECT_EQ(v.outcome, Outcome::Unknown);
  ASSERT_TRUE(v.counterexample) << "the false alarm is attached";
  EXPECT_NE(v.detail.find("false alarm"), std::string::npos);
}

TEST(Solve, FileInputGivesTheSameVerdict) {
  REQUIRE_SOLVER();
  SolverConfig c;
  c.args = {};
  c.input = ScriptInput::File;
  const auto p = load_problem("acyclic", "addLocal");
  const auto v = check_with_solver(p, plan_scopes(p, {{}, 2}), c);
  EXPECT_EQ(v.outcome, Outcome::Counterexample) << v.detail;
}

TEST(Solve, ReconstructedInstancesAreWellFormed) {
  REQUIRE_SOLVER();
  for (const std::string m : {"hierarchical", "acyclic"}) {
    for (int n : {2, 3}) {
      const auto p = load_problem(m, "addLocal");
      const auto v = check_with_solver(p, plan_scopes(p, {{}, n}), SolverConfig{});
      ASSERT_TRUE(v.counterexample) << m << n;
      EXPECT_FALSE(well_formedness_violation(p.hierarchy, p.relations, v.counterexample->instance));
      for (const auto& [ty, b] : v.plan.bounds) {
        EXPECT_LE(static_cast<int>(v.counterexample->instance.types[static_cast<std::size_t>(ty)].size()), b.atoms);
      }
    }
  }
}
