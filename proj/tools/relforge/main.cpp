#include <iostream>

#include "relforge/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return relforge::cli::run(args, std::cout, std::cerr);
}
