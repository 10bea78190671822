#include <iostream>

#include "teamtab/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return teamtab::cli::run(args, std::cout, std::cerr);
}
