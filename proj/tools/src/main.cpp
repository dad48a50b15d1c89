#include <iostream>

#include "vecsim_cli/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return vecsim::cli::run(args, std::cout, std::cerr);
}
