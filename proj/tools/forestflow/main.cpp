#include <iostream>
#include <string>
#include <vector>

#include "forestflow/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return forestflow::cli::run(args, std::cout, std::cerr);
}
