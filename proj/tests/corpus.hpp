#pragma once

#include <string>

#include "alloysmt/parser.hpp"
#include "alloysmt/sema.hpp"

namespace testing_support {

inline std::string corpus_path(const std::string& model) {
  return std::string(ALLOYSMT_CORPUS_DIR) + "/" + model + ".als";
}

inline alloysmt::CheckedModel load_checked(const std::string& model) {
  return alloysmt::resolve_and_check(alloysmt::parse_file(corpus_path(model)));
}

inline alloysmt::CheckProblem load_problem(const std::string& model, const std::string& assertion) {
  return alloysmt::build_problem(load_checked(model), assertion);
}

}  // namespace testing_support
