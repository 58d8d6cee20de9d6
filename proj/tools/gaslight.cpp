#include <iostream>

#include "gaslight/cli.hpp"

int main(int argc, char** argv) {
  return gaslight::cli_main(argc, argv, std::cout, std::cerr);
}
