#include <iostream>
#include <string>
#include <vector>

#include "lattice_net/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return lattice_net::run_cli(args, std::cout, std::cerr);
}
