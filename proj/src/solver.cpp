#include "alloysmt/solver.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <map>

#include "alloysmt/diagnostics.hpp"

namespace alloysmt {

std::string SolverConfig::default_executable() {
  if (const char* env = std::getenv("ALLOYSMT_SOLVER"); env && *env) return env;
  return "/usr/local/bin/z3";
}

void SolverConfig::validate() const {
  if (!(timeout_seconds > 0)) throw Error(ErrorKind::Usage, "solver time limit must be positive");
  if (executable.empty()) throw Error(ErrorKind::Usage, "no solver executable configured");
}

namespace {

/// A temporary file removed on scope exit.
class TempFile {
 public:
  explicit TempFile(const std::string& content) {
    const auto dir = std::filesystem::temp_directory_path().string();
    std::string pattern = dir + "/alloysmt-XXXXXX.smt2";
    const int fd = mkstemps(pattern.data(), 5);
    if (fd < 0) throw Error(ErrorKind::Solver, "cannot create a temporary script file: " + std::string(std::strerror(errno)));
    path_ = pattern;
    std::size_t off = 0;
    while (off < content.size()) {
      const ssize_t n = ::write(fd, content.data() + off, content.size() - off);
      if (n < 0) {
        if (errno == EINTR) continue;
        ::close(fd);
        throw Error(ErrorKind::Solver, "cannot write the temporary script file");
      }
      off += static_cast<std::size_t>(n);
    }
    ::close(fd);
  }
  ~TempFile() { std::remove(path_.c_str()); }
  TempFile(const TempFile&) = delete;
  TempFile& operator=(const TempFile&) = delete;
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

void close_fd(int& fd) {
  if (fd >= 0) ::close(fd);
  fd = -1;
}

}  // namespace

RawResult run_solver(const std::string& script, const SolverConfig& config) {
  config.validate();
  const TempFile file(script);
  std::vector<std::string> argv_s{config.executable};
  argv_s.insert(argv_s.end(), config.args.begin(), config.args.end());
  if (config.input == ScriptInput::File) argv_s.push_back(file.path());
  std::vector<char*> argv;
  for (auto& a : argv_s) argv.push_back(a.data());
  argv.push_back(nullptr);

  int out_pipe[2];
  int err_pipe[2];
  int exec_pipe[2];  // reports exec failure; closed on successful exec
  if (pipe(out_pipe) || pipe(err_pipe) || pipe2(exec_pipe, O_CLOEXEC))
    throw Error(ErrorKind::Solver, "cannot create pipes: " + std::string(std::strerror(errno)));
  const auto start = std::chrono::steady_clock::now();
  const pid_t pid = fork();
  if (pid < 0) throw Error(ErrorKind::Solver, "cannot fork: " + std::string(std::strerror(errno)));
  if (pid == 0) {
    setpgid(0, 0);
    const int in = config.input == ScriptInput::Stdin ? ::open(file.path().c_str(), O_RDONLY) : ::open("/dev/null", O_RDONLY);
    if (in >= 0) dup2(in, 0);
    dup2(out_pipe[1], 1);
    dup2(err_pipe[1], 2);
    ::close(out_pipe[0]);
    ::close(err_pipe[0]);
    ::close(exec_pipe[0]);
    execvp(argv[0], argv.data());
    const int e = errno;
    [[maybe_unused]] const ssize_t n = ::write(exec_pipe[1], &e, sizeof e);
    _exit(127);
  }
  setpgid(pid, pid);
  ::close(out_pipe[1]);
  ::close(err_pipe[1]);
  ::close(exec_pipe[1]);
  int exec_errno = 0;
  while (true) {
    const ssize_t n = ::read(exec_pipe[0], &exec_errno, sizeof exec_errno);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) exec_errno = 0;
    break;
  }
  ::close(exec_pipe[0]);
  if (exec_errno != 0) {
    waitpid(pid, nullptr, 0);
    ::close(out_pipe[0]);
    ::close(err_pipe[0]);
    throw Error(ErrorKind::Solver, "cannot execute solver '" + config.executable + "': " + std::strerror(exec_errno));
  }

  RawResult r;
  int fds[2] = {out_pipe[0], err_pipe[0]};
  std::string* sinks[2] = {&r.out, &r.err};
  const auto deadline = start + std::chrono::duration<double>(config.timeout_seconds);
  char buf[65536];
  while (fds[0] >= 0 || fds[1] >= 0) {
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) {
      r.timed_out = true;
      break;
    }
    pollfd pfd[2];
    nfds_t k = 0;
    int which[2];
    for (int i = 0; i < 2; ++i) {
      if (fds[i] < 0) continue;
      pfd[k] = pollfd{fds[i], POLLIN, 0};
      which[k++] = i;
    }
    const int ready = poll(pfd, k, static_cast<int>(std::min<long long>(left.count(), 1000)));
    if (ready < 0 && errno != EINTR) break;
    for (nfds_t j = 0; j < k && ready > 0; ++j) {
      if (!(pfd[j].revents & (POLLIN | POLLHUP | POLLERR))) continue;
      const int i = which[j];
      const ssize_t n = ::read(fds[i], buf, sizeof buf);
      if (n > 0) {
        sinks[i]->append(buf, static_cast<std::size_t>(n));
      } else if (n == 0 || errno != EINTR) {
        close_fd(fds[i]);
      }
    }
  }
  if (r.timed_out) kill(-pid, SIGKILL);
  close_fd(fds[0]);
  close_fd(fds[1]);
  int status = 0;
  while (waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  r.exit_status = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

// ---- verdicts ----------------------------------------------------------------------

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string excerpt(const std::string& s) { return s.size() > 400 ? s.substr(0, 400) + "..." : s; }

bool is_error(const smt::Term& t) { return t->is_list && !t->kids.empty() && smt::is_atom(t->kids[0], "error"); }

}  // namespace

ParsedResult parse_result(const RawResult& raw) {
  ParsedResult out;
  if (raw.timed_out) {
    out.answer = Answer::Timeout;
    return out;
  }
  const auto nl = raw.out.find('\n');
  const std::string first = trim(raw.out.substr(0, nl));
  const std::string rest = nl == std::string::npos ? std::string() : raw.out.substr(nl + 1);
  if (first == "sat") {
    out.answer = Answer::Sat;
  } else if (first == "unsat") {
    out.answer = Answer::Unsat;
    return out;
  } else if (first == "unknown") {
    out.answer = Answer::Unknown;
  } else {
    throw Error(ErrorKind::Solver, "solver gave no verdict (exit status " + std::to_string(raw.exit_status) +
                                       "): " + excerpt(trim(raw.out + "\n" + raw.err)));
  }
  if (trim(rest).empty()) return out;
  std::vector<smt::Term> terms;
  try {
    terms = smt::parse(rest);
  } catch (const Error& e) {
    throw Error(ErrorKind::Solver, "malformed model: " + e.message() + "; raw output: " + excerpt(rest));
  }
  if (terms.empty() || std::any_of(terms.begin(), terms.end(), is_error)) {
    if (out.answer == Answer::Sat)
      throw Error(ErrorKind::Solver, "sat without a model: " + excerpt(trim(rest)));
    return out;
  }
  out.model = std::move(terms);
  return out;
}

Counterexample reconstruct(const CheckProblem& p, Translation& t, const std::vector<smt::Term>& model) {
  const auto& h = p.hierarchy;
  const auto interp = smt::Interpretation::from_model(model);
  FormulaTranslator ft(p, t);
  Counterexample c;
  Instance& inst = c.instance;
  // Per top: model element index -> atom, -1 for the non-value.
  std::map<TypeId, std::vector<int>> atom_of;
  std::map<TypeId, std::vector<std::string>> element_names;
  for (TypeId top : h.tops()) {
    const auto& sort = t.types[static_cast<std::size_t>(top)].sort;
    if (interp.sort_size(sort) == 0) throw Error(ErrorKind::Solver, "model has no universe for sort " + sort);
    const auto& elems = interp.elements(sort);
    int nonvalue = -1;
    if (const auto it = t.nonvalues.find(top); it != t.nonvalues.end()) nonvalue = interp.eval(smt::sym(it->second));
    auto& map = atom_of[top];
    int real = 0;
    for (int e = 0; e < static_cast<int>(elems.size()); ++e) {
      if (e == nonvalue) {
        map.push_back(-1);
        continue;
      }
      map.push_back(inst.atoms++);
      inst.atom_names.push_back(h.name(top) + "$" + std::to_string(real++));
    }
    element_names[top] = elems;
  }
  inst.types.assign(static_cast<std::size_t>(h.size()), TupleSet(1, inst.atoms));
  for (TypeId ty = 0; ty < h.size(); ++ty) {
    const TypeId top = h.top(ty);
    const auto& map = atom_of[top];
    for (std::size_t e = 0; e < map.size(); ++e) {
      if (map[e] < 0) continue;
      if (interp.holds(ft.membership(ir::type(h, ty), {smt::sym(element_names[top][e])}))) inst.types[static_cast<std::size_t>(ty)].insert({map[e]});
    }
  }
  for (std::size_t ri = 0; ri < p.relations.size(); ++ri) {
    const auto& r = p.relations[ri];
    const auto rel = ir::relation(p.relations, static_cast<int>(ri));
    TupleSet rows(r.arity(), inst.atoms);
    std::vector<std::size_t> idx(r.columns.size(), 0);
    std::vector<const std::vector<int>*> maps;
    std::vector<const std::vector<std::string>*> names;
    for (TypeId col : r.columns) {
      maps.push_back(&atom_of[h.top(col)]);
      names.push_back(&element_names[h.top(col)]);
    }
    for (bool done = false; !done;) {
      std::vector<smt::Term> terms;
      std::vector<int> tuple;
      bool real = true;
      for (std::size_t k = 0; k < idx.size(); ++k) {
        const int a = (*maps[k])[idx[k]];
        if (a < 0) real = false;
        tuple.push_back(a);
        terms.push_back(smt::sym((*names[k])[idx[k]]));
      }
      if (real && interp.holds(ft.membership(rel, terms))) rows.insert(tuple);
      // Next tuple, last column fastest.
      for (std::size_t k = idx.size();;) {
        if (k == 0) {
          done = true;
          break;
        }
        --k;
        if (++idx[k] < maps[k]->size()) break;
        idx[k] = 0;
      }
    }
    inst.relations.push_back(std::move(rows));
  }
  for (std::size_t i = 0; i < p.skolems.size(); ++i) {
    const TypeId top = h.top(p.skolems[i].type);
    const int e = interp.eval(smt::sym(t.skolems[i]));
    const int a = atom_of[top].at(static_cast<std::size_t>(e));
    if (a < 0) throw Error(ErrorKind::Solver, "skolem " + p.skolems[i].name + " is the non-value in the model");
    c.skolem_atoms.push_back(a);
  }
  return c;
}

bool validate_counterexample(const Counterexample& c, const CheckProblem& p, std::string* why) {
  const auto& inst = c.instance;
  const auto expect = [&](bool ok, const std::string& what) {
    if (!ok) throw Error(ErrorKind::Oracle, "candidate counterexample " + what);
  };
  expect(static_cast<int>(inst.atom_names.size()) == inst.atoms, "names a different number of atoms than it has");
  expect(inst.types.size() == static_cast<std::size_t>(p.hierarchy.size()), "does not cover every type");
  expect(inst.relations.size() == p.relations.size(), "does not cover every relation");
  for (const auto& ts : inst.types) expect(ts.atoms() == inst.atoms && ts.arity() == 1, "has a type outside its universe");
  for (std::size_t r = 0; r < inst.relations.size(); ++r)
    expect(inst.relations[r].atoms() == inst.atoms && inst.relations[r].arity() == p.relations[r].arity(),
           "has a relation outside its universe");
  expect(c.skolem_atoms.size() == p.skolems.size(), "binds a different number of skolems");
  for (int a : c.skolem_atoms) expect(a >= 0 && a < inst.atoms, "binds a skolem outside its universe");
  return satisfies(p, c, why);
}

std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::Proven:
      return "proven";
    case Outcome::Counterexample:
      return "counterexample";
    case Outcome::BoundedNoCounterexample:
      return "bounded-no-counterexample";
    case Outcome::Unknown:
      return "unknown";
    case Outcome::Timeout:
      return "timeout";
  }
  return "unknown";
}

Verdict decide(const CheckProblem& p, Translation& t, const RawResult& raw) {
  Verdict v;
  v.plan = t.plan;
  v.solver_seconds = raw.seconds;
  const auto parsed = parse_result(raw);
  switch (parsed.answer) {
    case Answer::Timeout:
      v.outcome = Outcome::Timeout;
      v.detail = "solver exceeded the time limit";
      return v;
    case Answer::Unsat:
      v.outcome = t.plan.unbounded() ? Outcome::Proven : Outcome::BoundedNoCounterexample;
      v.detail = t.plan.unbounded() ? "unsat with no finitized types" : "unsat with finitized types; valid only within their bounds";
      return v;
    case Answer::Sat:
    case Answer::Unknown:
      break;
  }
  if (!parsed.model) {
    v.outcome = Outcome::Unknown;
    v.detail = "solver answered unknown";
    return v;
  }
  Counterexample c = reconstruct(p, t, *parsed.model);
  std::string why;
  const bool ok = validate_counterexample(c, p, &why);
  v.counterexample = std::move(c);
  if (ok) {
    v.outcome = Outcome::Counterexample;
    v.detail = parsed.answer == Answer::Sat ? "validated model" : "validated model of an unknown answer";
  } else {
    v.outcome = Outcome::Unknown;
    v.detail = "false alarm: the model fails oracle validation (" + why + ")";
  }
  return v;
}

Verdict check_with_solver(const CheckProblem& p, const ScopePlan& plan, const SolverConfig& config) {
  auto t = translate(p, plan);
  const auto raw = run_solver(t.text(), config);
  return decide(p, t, raw);
}

}  // namespace alloysmt
