#include <vector>

#include "dowlab/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return dowlab::cli::run_cli(std::move(args));
}
