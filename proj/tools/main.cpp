#include <iostream>
#include <string>
#include <vector>

#include "lightplan/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return lightplan::cli::run(args, std::cout, std::cerr);
}
