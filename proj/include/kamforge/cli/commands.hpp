#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace kamforge::cli {

// Exit status: 0 success, 2 hypothesis-check failure (verdicts still emitted), 1 execution error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitHypothesis = 2;

// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kamforge::cli
