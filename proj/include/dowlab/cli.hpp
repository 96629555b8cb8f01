#pragma once

#include <iostream>
#include <string>
#include <vector>

namespace dowlab::cli {

/// Entry point behind the binary: parses `args` (without the program name),
/// runs the chosen subcommand, and reports through the given streams.
/// Returns 0 on success, 1 when loading or the pipeline fails, 2 on a usage
/// error.
int run_cli(std::vector<std::string> args, std::ostream& out = std::cout,
            std::ostream& err = std::cerr);

}  // namespace dowlab::cli
