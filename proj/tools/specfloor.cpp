#include <iostream>

#include "specfloor/cli/commands.hpp"

int main(int argc, char **argv) {
  return specfloor::cli::run_cli(argc, argv, std::cout, std::cerr);
}
