#include <iostream>
#include <string>
#include <vector>

#include "iterlog/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return iterlog::run(args, std::cout, std::cerr);
}
