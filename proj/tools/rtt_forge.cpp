#include <iostream>

#include "rttforge/cli.hpp"

int main(int argc, char** argv) {
  return rttforge::cli::run(argc, argv, std::cout, std::cerr);
}
