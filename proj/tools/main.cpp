#include <iostream>
#include <string>
#include <vector>

#include "beatscope/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return beatscope::run_cli(args, std::cout, std::cerr);
}
