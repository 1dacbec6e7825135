#include <iostream>
#include <string>
#include <vector>

#include "multiren/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return multiren::cli::run(args, std::cout, std::cerr);
}
