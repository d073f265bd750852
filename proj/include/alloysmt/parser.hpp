#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "alloysmt/ast.hpp"
#include "alloysmt/lexer.hpp"

namespace alloysmt {

/// Recursive-descent parser for the supported Alloy subset.
///
/// Precedence, tightest first: `^ *`, `.`, `->`, `&`, `+ -`, comparisons, `not`, `and`,
/// `or`, `iff`, `implies`. Multi-variable quantifiers are desugared into nested
/// single-variable binders. Constructs of full Alloy that the subset does not cover are
/// rejected with ErrorKind::OutOfScope naming the construct.
SourceModel parse_model(const std::vector<Token>& tokens, std::string source_name = {});

/// tokenize + parse_model.
SourceModel parse_source(std::string_view text, std::string source_name = {});

/// Reads and parses a file. Throws Error(Usage) if it cannot be read.
SourceModel parse_file(const std::string& path);

/// Parses a single formula or expression (used by tests and tooling).
FormulaPtr parse_formula_text(std::string_view text);
ExprPtr parse_expr_text(std::string_view text);

/// Renders a model so that parse_source(pretty_print(m)) is structurally equal to m.
std::string pretty_print(const SourceModel& model);
std::string pretty_print(const Formula& f);
std::string pretty_print(const Expr& e);

}  // namespace alloysmt
