#include <iostream>
#include <string>
#include <vector>

#include "eigencoin/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return eigencoin::cli::run(args, std::cout, std::cerr);
}
