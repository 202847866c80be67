#include <iostream>

#include "ncpano/cli.hpp"

int main(int argc, char** argv) {
  return ncpano::run_cli(argc, argv, std::cout, std::cerr);
}
