#pragma once

#include "minstrel/error.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace minstrel::cli {

/// Process exit codes.
enum Exit : int {
    kOk = 0,
    kLintErrors = 1,
    kUsage = 2,
    kParse = 3,
    kState = 4,
    kAgent = 5,
    kStore = 6,
    kIo = 7,
};

int exit_code_for(ErrorCode code) noexcept;

/// Runs the `minstrel` command line; `args` excludes the program name.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

/// Names of all subcommands, for the API parity check.
std::vector<std::string> subcommand_names();

}  // namespace minstrel::cli
