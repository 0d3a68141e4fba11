#include <iostream>
#include <string>
#include <vector>

#include "collage/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return collage::cli::run(args, std::cout, std::cerr);
}
