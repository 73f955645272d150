#include <iostream>
#include <string>
#include <vector>

#include "cumulant/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return cumulant::run_cli(args, std::cout, std::cerr);
}
