#include <iostream>
#include <string>
#include <vector>

#include "slicing/cli/app.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return slicing::cli::run(args, std::cout, std::cerr);
}
