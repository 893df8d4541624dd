#include <iostream>
#include <string>
#include <vector>

#include "wsnmf/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return wsnmf::run_cli(args, std::cout, std::cerr);
}
