#include <iostream>
#include <string>
#include <vector>

#include "dggan/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return dggan::cli::run(args, std::cout, std::cerr);
}
