#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace alloysmt::smt {

struct Node;
using Term = std::shared_ptr<const Node>;

/// An S-expression. Atoms hold symbols unquoted (`b'` rather than `|b'|`); the printer
/// adds quotes where SMT-LIB needs them. String literals keep their double quotes.
struct Node {
  bool is_list = false;
  std::string atom;
  std::vector<Term> kids;
};

Term sym(std::string name);
Term list(std::vector<Term> kids);
Term app(std::string head, std::vector<Term> args);

bool is_atom(const Term& t, std::string_view name);
bool same(const Term& a, const Term& b);

/// Builders that fold constants and flatten nested conjunctions and disjunctions.
Term mk_true();
Term mk_false();
Term mk_bool(bool value);
Term mk_not(Term a);
Term mk_and(std::vector<Term> kids);
Term mk_or(std::vector<Term> kids);
Term mk_implies(Term a, Term b);
Term mk_iff(Term a, Term b);
Term mk_eq(Term a, Term b);
Term mk_ite(Term c, Term a, Term b);

using SortedVar = std::pair<std::string, std::string>;  // name, sort
Term mk_forall(std::vector<SortedVar> vars, Term body);
Term mk_exists(std::vector<SortedVar> vars, Term body);

/// SMT-LIB symbol syntax: bare when legal, `|...|` otherwise.
std::string quote_symbol(std::string_view name);
bool is_simple_symbol(std::string_view name);

/// One line, no trailing newline.
std::string print(const Term& t);
/// Breaks long lists over indented lines.
std::string pretty(const Term& t, int width = 100);

/// Parses a sequence of S-expressions; comments are skipped. Throws Error(Solver) on
/// malformed input.
std::vector<Term> parse(std::string_view text);

struct Command {
  Term term;
  std::string comment;  // printed as `;; comment` on the line above, when not empty
};

class Script {
 public:
  void comment(std::string text);
  void add(Term command, std::string comment = {});
  void set_logic(std::string logic);
  void set_option(std::string option, std::string value);
  void declare_sort(const std::string& name);
  void declare_fun(const std::string& name, const std::vector<std::string>& args,
                   const std::string& result);
  void declare_const(const std::string& name, const std::string& sort);
  void define_fun(const std::string& name, const std::vector<SortedVar>& params,
                  const std::string& result, Term body);
  void assert_(Term t, std::string comment = {});

  const std::vector<Command>& commands() const { return commands_; }
  std::string str() const;

 private:
  std::vector<Command> commands_;
};

/// A finite interpretation: each sort is a list of named elements, each function is a
/// table or a `define-fun` body. Values are element indices; Bool is 0 or 1.
class Interpretation {
 public:
  void add_sort(const std::string& sort, std::vector<std::string> elements);
  void add_sort(const std::string& sort, int size);
  int sort_size(const std::string& sort) const;
  const std::vector<std::string>& elements(const std::string& sort) const;

  /// Element symbols of every sort, and definitions, from a `get-model` response.
  static Interpretation from_model(const std::vector<Term>& model);

  void define(const std::string& name, std::vector<SortedVar> params, std::string result, Term body);
  void set_table(const std::string& name, std::vector<std::string> arg_sorts, std::string result,
                 std::function<int(const std::vector<int>&)> table);
  void set_constant(const std::string& name, std::string sort, int value);
  /// Loads every `define-fun` of a script.
  void load_definitions(const Script& script);
  bool defines(const std::string& name) const;

  int eval(const Term& t) const;
  bool holds(const Term& t) const { return eval(t) != 0; }
  /// Result sort of a declared or defined function.
  std::string result_sort(const std::string& name) const;

 private:
  struct Fun {
    std::vector<SortedVar> params;
    std::vector<std::string> arg_sorts;
    std::string result;
    Term body;
    std::function<int(const std::vector<int>&)> table;
  };
  using Env = std::vector<std::pair<std::string, int>>;

  int eval(const Term& t, Env& env) const;
  int quantified(const Term& t, Env& env, bool universal) const;

  std::map<std::string, std::vector<std::string>> sorts_;
  std::map<std::string, std::pair<std::string, int>> elements_;  // symbol -> sort, index
  std::map<std::string, Fun> funs_;
};

}  // namespace alloysmt::smt
