#include <iostream>
#include <string>
#include <vector>

#include "netdiff/commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return netdiff::cli::run(args, std::cout, std::cerr);
}
