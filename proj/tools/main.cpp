#include <iostream>

#include "rscat/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return rscat::run_command(args, std::cout, std::cerr);
}
