#include <iostream>

#include "lammos/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return lammos::cli::main(args, std::cout, std::cerr);
}
