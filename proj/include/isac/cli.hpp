#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace isac::cli {

enum ExitCode : int {
  kSuccess = 0,
  kVerificationFailed = 1,
  kInputError = 2,
  kNumericalFailure = 3,
};

int run(int argc, char** argv);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace isac::cli
