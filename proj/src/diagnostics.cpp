#include "alloysmt/diagnostics.hpp"

namespace alloysmt {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Lexical: return "lexical error";
    case ErrorKind::Syntax: return "syntax error";
    case ErrorKind::OutOfScope: return "feature out of scope";
    case ErrorKind::Type: return "type error";
    case ErrorKind::Scope: return "scope error";
    case ErrorKind::Translation: return "translation error";
    case ErrorKind::Solver: return "solver error";
    case ErrorKind::Oracle: return "oracle error";
    case ErrorKind::Usage: return "usage error";
  }
  return "error";
}

namespace {

std::string render(ErrorKind kind, const std::string& message, const Pos& pos) {
  std::string out;
  if (pos.line > 0) {
    out += std::to_string(pos.line) + ":" + std::to_string(pos.column) + ": ";
  }
  out += to_string(kind);
  out += ": ";
  out += message;
  return out;
}

}  // namespace

Error::Error(ErrorKind kind, std::string message, Pos pos)
    : std::runtime_error(render(kind, message, pos)),
      kind_(kind),
      pos_(pos),
      message_(std::move(message)) {}

}  // namespace alloysmt
