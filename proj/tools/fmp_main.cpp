#include <iostream>

#include "fmp/cli.hpp"

int main(int argc, char** argv) {
  return fmp::cli_main(argc, argv, std::cout, std::cerr);
}
