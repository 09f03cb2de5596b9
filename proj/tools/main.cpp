#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return hmcdist::cli::run_cli(args, std::cin, std::cout, std::cerr);
}
