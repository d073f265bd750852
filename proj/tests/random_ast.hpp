#pragma once

// Random well-formed ASTs for round-trip testing. Shapes only; nothing here is type-checked.

#include <random>
#include <string>

#include "alloysmt/ast.hpp"

namespace testing_support {

using namespace alloysmt;

inline int pick(std::mt19937& rng, int n) {
  return std::uniform_int_distribution<int>(0, n - 1)(rng);
}

inline std::string random_ident(std::mt19937& rng) {
  static const char* names[] = {"a", "b", "b'", "b''", "n", "n'", "x", "y_1", "Book",
                                "Name", "Addr", "addr", "names", "r", "s", "T\"", "lookup"};
  return names[pick(rng, static_cast<int>(std::size(names)))];
}

inline ExprPtr random_expr(std::mt19937& rng, int depth) {
  if (depth <= 0 || pick(rng, 4) == 0) {
    if (pick(rng, 6) == 0) {
      std::vector<ExprPtr> args;
      const int n = pick(rng, 3);
      for (int i = 0; i < n; ++i) args.push_back(random_expr(rng, 0));
      return make_call(random_ident(rng), std::move(args));
    }
    return make_name(random_ident(rng));
  }
  static const ExprKind binary[] = {ExprKind::Union, ExprKind::Intersection, ExprKind::Difference,
                                    ExprKind::Join, ExprKind::Product};
  const int choice = pick(rng, 8);
  if (choice < 5) {
    return make_expr(binary[choice], {random_expr(rng, depth - 1), random_expr(rng, depth - 1)});
  }
  if (choice == 5) return make_expr(ExprKind::Closure, {random_expr(rng, depth - 1)});
  if (choice == 6) return make_expr(ExprKind::ReflexiveClosure, {random_expr(rng, depth - 1)});
  std::vector<ExprPtr> args;
  const int n = 1 + pick(rng, 2);
  for (int i = 0; i < n; ++i) args.push_back(random_expr(rng, depth - 1));
  return make_call(random_ident(rng), std::move(args));
}

inline FormulaPtr random_formula(std::mt19937& rng, int depth) {
  if (depth <= 0 || pick(rng, 5) == 0) {
    switch (pick(rng, 4)) {
      case 0: return make_bool(pick(rng, 2) == 0);
      case 1: {
        static const Quantifier qs[] = {Quantifier::Some, Quantifier::One, Quantifier::Lone,
                                        Quantifier::No};
        return make_cardinality(qs[pick(rng, 4)], random_expr(rng, 2));
      }
      case 2: {
        std::vector<ExprPtr> args;
        const int n = pick(rng, 3);
        for (int i = 0; i < n; ++i) args.push_back(random_expr(rng, 1));
        return make_pred_call(random_ident(rng), std::move(args));
      }
      default: {
        static const CompareOp ops[] = {CompareOp::Equal, CompareOp::NotEqual, CompareOp::In,
                                        CompareOp::Colon};
        return make_compare(ops[pick(rng, 4)], random_expr(rng, 2), random_expr(rng, 2));
      }
    }
  }
  switch (pick(rng, 7)) {
    case 0: return make_not(random_formula(rng, depth - 1));
    case 1: return make_binary(FormulaKind::And, random_formula(rng, depth - 1), random_formula(rng, depth - 1));
    case 2: return make_binary(FormulaKind::Or, random_formula(rng, depth - 1), random_formula(rng, depth - 1));
    case 3: return make_binary(FormulaKind::Implies, random_formula(rng, depth - 1), random_formula(rng, depth - 1));
    case 4: return make_binary(FormulaKind::Iff, random_formula(rng, depth - 1), random_formula(rng, depth - 1));
    default: {
      static const Quantifier qs[] = {Quantifier::All, Quantifier::Some, Quantifier::One,
                                      Quantifier::Lone, Quantifier::No};
      return make_quantified(qs[pick(rng, 5)], random_ident(rng), random_expr(rng, 1),
                             random_formula(rng, depth - 1));
    }
  }
}

inline SourceModel random_model(std::mt19937& rng) {
  SourceModel m;
  const int nsigs = 1 + pick(rng, 3);
  for (int i = 0; i < nsigs; ++i) {
    SigDecl s;
    s.name = "S" + std::to_string(i);
    s.is_abstract = pick(rng, 3) == 0;
    if (i > 0 && pick(rng, 2) == 0) {
      s.kind = pick(rng, 2) == 0 ? SigKind::Extends : SigKind::In;
      s.parent = "S" + std::to_string(pick(rng, i));
    }
    const int nfields = pick(rng, 3);
    for (int k = 0; k < nfields; ++k) {
      FieldDecl f;
      f.name = "f" + std::to_string(i) + std::to_string(k);
      const int ncols = 1 + pick(rng, 2);
      for (int c = 0; c < ncols; ++c) f.columns.push_back(random_expr(rng, 1));
      static const Multiplicity ms[] = {Multiplicity::One, Multiplicity::Lone, Multiplicity::Some,
                                        Multiplicity::Set};
      f.multiplicity = ms[pick(rng, 4)];
      s.fields.push_back(std::move(f));
    }
    m.sigs.push_back(std::move(s));
  }
  const int nparas = 1 + pick(rng, 4);
  int asserts = 0;
  for (int i = 0; i < nparas; ++i) {
    switch (pick(rng, 4)) {
      case 0: {
        FactDecl d;
        if (pick(rng, 2)) d.name = "fact" + std::to_string(i);
        const int n = pick(rng, 3);
        for (int k = 0; k < n; ++k) d.body.push_back(random_formula(rng, 3));
        m.paragraphs.emplace_back(std::move(d));
        break;
      }
      case 1: {
        PredDecl d;
        d.name = "p" + std::to_string(i);
        const int np = pick(rng, 4);
        for (int k = 0; k < np; ++k) d.params.push_back({random_ident(rng), random_expr(rng, 1), {}});
        d.body.push_back(random_formula(rng, 3));
        m.paragraphs.emplace_back(std::move(d));
        break;
      }
      case 2: {
        FunDecl d;
        d.name = "fn" + std::to_string(i);
        const int np = pick(rng, 3);
        for (int k = 0; k < np; ++k) d.params.push_back({random_ident(rng), random_expr(rng, 1), {}});
        if (pick(rng, 2)) d.result_multiplicity = Multiplicity::Set;
        d.result_type = random_expr(rng, 1);
        d.body = random_expr(rng, 3);
        m.paragraphs.emplace_back(std::move(d));
        break;
      }
      default: {
        AssertDecl d;
        d.name = "as" + std::to_string(asserts++);
        d.body.push_back(random_formula(rng, 3));
        m.paragraphs.emplace_back(d);
        CheckCmd c;
        c.assertion = d.name;
        if (pick(rng, 2)) c.scope = 1 + pick(rng, 5);
        m.paragraphs.emplace_back(std::move(c));
      }
    }
  }
  return m;
}

}  // namespace testing_support
