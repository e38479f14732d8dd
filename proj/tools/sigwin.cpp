#include <iostream>
#include <string>
#include <vector>

#include "sigwin/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return sigwin::run_cli(args, std::cout, std::cerr);
}
