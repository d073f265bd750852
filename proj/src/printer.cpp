#include <sstream>

#include "alloysmt/parser.hpp"

namespace alloysmt {

namespace {

// Binding strength, loosest first. A child is parenthesized when its level is below the
// minimum its position requires.
int level(const Expr& e) {
  switch (e.kind) {
    case ExprKind::Union:
    case ExprKind::Difference: return 1;
    case ExprKind::Intersection: return 2;
    case ExprKind::Product: return 3;
    case ExprKind::Join: return 4;
    case ExprKind::Closure:
    case ExprKind::ReflexiveClosure: return 5;
    case ExprKind::Name:
    case ExprKind::Call: return 6;
  }
  return 6;
}

int level(const Formula& f) {
  switch (f.kind) {
    case FormulaKind::Quantified: return 0;
    case FormulaKind::Implies: return 1;
    case FormulaKind::Iff: return 2;
    case FormulaKind::Or: return 3;
    case FormulaKind::And: return 4;
    case FormulaKind::Not: return 5;
    default: return 6;
  }
}

void print_expr(std::ostream& os, const Expr& e, int min_level);

void print_args(std::ostream& os, const std::vector<ExprPtr>& args) {
  os << '[';
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) os << ", ";
    print_expr(os, *args[i], 0);
  }
  os << ']';
}

void print_expr(std::ostream& os, const Expr& e, int min_level) {
  const int lv = level(e);
  const bool parens = lv < min_level;
  if (parens) os << '(';
  switch (e.kind) {
    case ExprKind::Name:
      os << e.name;
      break;
    case ExprKind::Call:
      os << e.name;
      print_args(os, e.args);
      break;
    case ExprKind::Closure:
    case ExprKind::ReflexiveClosure:
      os << (e.kind == ExprKind::Closure ? '^' : '*');
      print_expr(os, *e.args[0], lv);
      break;
    default: {
      const char* op = e.kind == ExprKind::Union          ? " + "
                       : e.kind == ExprKind::Difference   ? " - "
                       : e.kind == ExprKind::Intersection ? " & "
                       : e.kind == ExprKind::Product      ? " -> "
                                                          : ".";
      print_expr(os, *e.args[0], lv);
      os << op;
      print_expr(os, *e.args[1], lv + 1);
    }
  }
  if (parens) os << ')';
}

const char* compare_text(CompareOp op) {
  switch (op) {
    case CompareOp::Equal: return " = ";
    case CompareOp::NotEqual: return " != ";
    case CompareOp::In: return " in ";
    case CompareOp::Colon: return " : ";
  }
  return " ? ";
}

void print_formula(std::ostream& os, const Formula& f, int min_level) {
  const int lv = level(f);
  const bool parens = lv < min_level;
  if (parens) os << '(';
  switch (f.kind) {
    case FormulaKind::True: os << "true"; break;
    case FormulaKind::False: os << "false"; break;
    case FormulaKind::Compare:
      print_expr(os, *f.lhs, 0);
      os << compare_text(f.op);
      print_expr(os, *f.rhs, 0);
      break;
    case FormulaKind::Not:
      os << "not ";
      print_formula(os, *f.kids[0], lv);
      break;
    case FormulaKind::And:
    case FormulaKind::Or:
    case FormulaKind::Iff:
      print_formula(os, *f.kids[0], lv);
      os << (f.kind == FormulaKind::And ? " and " : f.kind == FormulaKind::Or ? " or " : " iff ");
      print_formula(os, *f.kids[1], lv + 1);
      break;
    case FormulaKind::Implies:
      // Right associative.
      print_formula(os, *f.kids[0], lv + 1);
      os << " implies ";
      print_formula(os, *f.kids[1], lv);
      break;
    case FormulaKind::Quantified:
      os << to_string(f.quant) << ' ' << f.name << ": ";
      print_expr(os, *f.lhs, 0);
      os << " | ";
      print_formula(os, *f.kids[0], 0);
      break;
    case FormulaKind::Cardinality:
      os << to_string(f.quant) << ' ';
      print_expr(os, *f.lhs, 0);
      break;
    case FormulaKind::PredCall:
      os << f.name;
      print_args(os, f.args);
      break;
  }
  if (parens) os << ')';
}

void print_params(std::ostream& os, const std::vector<Param>& params) {
  os << '[';
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (i) os << ", ";
    os << params[i].name;
    const bool shares_next =
        i + 1 < params.size() && structurally_equal(*params[i].type, *params[i + 1].type);
    if (!shares_next) {
      os << ": ";
      print_expr(os, *params[i].type, 0);
    }
  }
  os << ']';
}

void print_body(std::ostream& os, const std::vector<FormulaPtr>& body) {
  if (body.empty()) {
    os << "{}\n";
    return;
  }
  os << "{\n";
  for (const auto& f : body) {
    os << "  ";
    print_formula(os, *f, 0);
    os << '\n';
  }
  os << "}\n";
}

void print_sig(std::ostream& os, const SigDecl& s) {
  if (s.is_abstract) os << "abstract ";
  os << "sig " << s.name;
  if (s.kind == SigKind::Extends) os << " extends " << s.parent;
  if (s.kind == SigKind::In) os << " in " << s.parent;
  if (s.fields.empty()) {
    os << " {}\n";
    return;
  }
  os << " {\n";
  for (std::size_t i = 0; i < s.fields.size(); ++i) {
    const auto& fd = s.fields[i];
    os << "  " << fd.name << ": ";
    for (std::size_t c = 0; c < fd.columns.size(); ++c) {
      if (c) os << " -> ";
      if (c + 1 == fd.columns.size()) os << to_string(fd.multiplicity) << ' ';
      // Columns are parsed at join level.
      print_expr(os, *fd.columns[c], 4);
    }
    os << (i + 1 < s.fields.size() ? ",\n" : "\n");
  }
  os << "}\n";
}

struct ParagraphPrinter {
  std::ostream& os;

  void operator()(const FactDecl& d) const {
    os << "fact ";
    if (!d.name.empty()) os << d.name << ' ';
    print_body(os, d.body);
  }
  void operator()(const PredDecl& d) const {
    os << "pred " << d.name << ' ';
    print_params(os, d.params);
    os << ' ';
    print_body(os, d.body);
  }
  void operator()(const FunDecl& d) const {
    os << "fun " << d.name << ' ';
    print_params(os, d.params);
    os << ": ";
    if (d.result_multiplicity) os << to_string(*d.result_multiplicity) << ' ';
    print_expr(os, *d.result_type, 0);
    os << " {\n  ";
    print_expr(os, *d.body, 0);
    os << "\n}\n";
  }
  void operator()(const AssertDecl& d) const {
    os << "assert " << d.name << ' ';
    print_body(os, d.body);
  }
  void operator()(const CheckCmd& c) const {
    os << "check " << c.assertion;
    if (c.scope) os << " for " << *c.scope;
    os << '\n';
  }
};

}  // namespace

std::string pretty_print(const Expr& e) {
  std::ostringstream os;
  print_expr(os, e, 0);
  return os.str();
}

std::string pretty_print(const Formula& f) {
  std::ostringstream os;
  print_formula(os, f, 0);
  return os.str();
}

std::string pretty_print(const SourceModel& model) {
  std::ostringstream os;
  bool first = true;
  for (const auto& s : model.sigs) {
    if (!first) os << '\n';
    first = false;
    print_sig(os, s);
  }
  for (const auto& p : model.paragraphs) {
    if (!first) os << '\n';
    first = false;
    std::visit(ParagraphPrinter{os}, p);
  }
  return os.str();
}

}  // namespace alloysmt
