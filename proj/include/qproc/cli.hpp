#pragma once

#include <string>
#include <vector>

#include "qproc/io.hpp"

namespace qproc {

// Exit codes:
//   0  success
//   2  validation error (diagnostic names the violated invariant)
//   3  solver did not converge (result still emitted, flagged)
//   64 usage / unknown flag
//   65 malformed JSON (diagnostic carries line and column)
struct CliResult {
  int exit_code = 0;
  Json output;          // result document (also written to --out when given)
  std::string message;  // diagnostic on failure
};

// Dispatch a full command line (without the program name). Every subcommand is
// a thin shell over the library; the returned JSON equals the corresponding
// library call's serialization.
CliResult run_command(const std::vector<std::string>& args);

int run_cli(int argc, char** argv);

}  // namespace qproc
