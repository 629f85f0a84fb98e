#include <iostream>
#include <string>
#include <vector>

#include "stylo/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return stylo::cli_run(args, std::cout, std::cerr);
}
