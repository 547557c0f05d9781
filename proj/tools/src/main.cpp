#include <iostream>
#include <string>
#include <vector>

#include "dualgraph_cli/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return dualgraph::cli::run(args, std::cout, std::cerr);
}
