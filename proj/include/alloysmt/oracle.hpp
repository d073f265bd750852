#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "alloysmt/ir.hpp"
#include "alloysmt/sema.hpp"
#include "alloysmt/tupleset.hpp"

namespace alloysmt {

/// A finite interpretation: atoms 0..atoms-1, a unary set per type, a tuple set per
/// relation.
struct Instance {
  int atoms = 0;
  std::vector<std::string> atom_names;
  std::vector<TupleSet> types;
  std::vector<TupleSet> relations;
};

struct Counterexample {
  Instance instance;
  std::vector<int> skolem_atoms;  // parallel to CheckProblem::skolems
};

/// Direct set-semantics evaluator. With `defs`, predicate and function invocations are
/// evaluated by binding parameters to argument values instead of by substitution.
class Evaluator {
 public:
  Evaluator(const TypeHierarchy& h, const Instance& inst, const CheckedModel* defs = nullptr);

  void bind(int var, TupleSet value);
  void unbind(int var);
  /// Interprets the finitized constant `index` of type `t` as atom `atom`.
  void interpret(TypeId t, int index, int atom);

  TupleSet eval(const RExpr& e);
  bool holds(const RFormula& f);

 private:
  const TypeHierarchy& h_;
  const Instance& inst_;
  const CheckedModel* defs_;
  std::vector<std::pair<int, TupleSet>> env_;
  std::map<std::pair<TypeId, int>, int> constants_;

  const TupleSet& lookup(int var) const;
  bool quantified(const RFormula& f);
};

/// Checks the implicit constraints of the declarations: the type forest (subsets,
/// disjoint extends-siblings, exhaustive abstract parents, disjoint top-level types
/// covering the atoms), column typing, domain restrictions and multiplicities.
/// Returns a description of the first violation.
std::optional<std::string> well_formedness_violation(const TypeHierarchy& h,
                                                     const std::vector<RelationSchema>& rels,
                                                     const Instance& inst);

/// Well-formed, every fact holds, and the goal holds with skolems bound to the given atoms.
bool satisfies(const CheckProblem& p, const Counterexample& c, std::string* why = nullptr);

/// Upper bound on atoms per type. Every top-level type needs an entry; a subtype without
/// one is bounded by its parent.
using Bounds = std::map<TypeId, int>;

enum class OracleStrategy { Auto, Enumerate, Sat };

struct OracleOptions {
  OracleStrategy strategy = OracleStrategy::Auto;
  /// Enumeration is refused (or handed to the SAT strategy under Auto) above this many
  /// estimated candidate valuations.
  double ceiling = 5e7;
  /// Prune multiplicity and fact violations during generation. Without pruning every
  /// tuple subset is generated and filtered afterwards.
  bool prune = true;
};

struct OracleStats {
  double estimate = 0;
  std::uint64_t instances = 0;  // complete relation assignments reached
  std::uint64_t bindings = 0;   // skolem bindings evaluated
  std::string strategy;
  double seconds = 0;
};

enum class OracleOutcome { Counterexample, NoCounterexample, Refused };

struct OracleResult {
  OracleOutcome outcome = OracleOutcome::NoCounterexample;
  std::optional<Counterexample> counterexample;
  OracleStats stats;
  std::string detail;
};

/// Decides whether facts and goal have a model whose top-level types have between 1 and
/// n atoms (none when n is 0) and whose subtypes respect their bounds.
OracleResult check_within_scope(const CheckProblem& p, const Bounds& bounds,
                                const OracleOptions& options = {});

/// The SAT strategy: the same question, grounded into a propositional circuit with one
/// variable per possible atom, subtype membership, tuple and skolem binding, and decided
/// by the built-in CDCL solver. `type_bounds` comes from resolve_bounds.
OracleResult check_with_sat(const CheckProblem& p, const std::vector<int>& type_bounds);

double estimate_state_space(const CheckProblem& p, const Bounds& bounds);

/// Resolves `bounds` for every type: an explicit entry, else the parent's bound.
/// Throws Error(Oracle) when a top-level type has none.
std::vector<int> resolve_bounds(const TypeHierarchy& h, const Bounds& bounds);

/// Textual listing of types, relations and skolem bindings.
std::string render(const CheckProblem& p, const Counterexample& c);

/// Name of the most specific type containing the atom, used in listings.
std::string atom_label(const TypeHierarchy& h, const Instance& inst, int atom);

}  // namespace alloysmt
