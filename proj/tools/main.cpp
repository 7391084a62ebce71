#include <iostream>
#include <string>
#include <vector>

#include "nibt/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return nibt::cli_main(args, std::cout, std::cerr);
}
