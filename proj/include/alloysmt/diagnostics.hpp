#pragma once

#include <stdexcept>
#include <string>

#include "alloysmt/ast.hpp"

namespace alloysmt {

enum class ErrorKind {
  Lexical,
  Syntax,
  OutOfScope,  // recognised Alloy construct outside the supported subset
  Type,
  Scope,       // finitization policy violations
  Translation,
  Solver,
  Oracle,
  Usage,
};

std::string_view to_string(ErrorKind kind);

/// Base error for every pipeline stage. `pos` is {0,0} when no source position applies.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string message, Pos pos = {});

  ErrorKind kind() const noexcept { return kind_; }
  const Pos& pos() const noexcept { return pos_; }
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorKind kind_;
  Pos pos_;
  std::string message_;
};

}  // namespace alloysmt
