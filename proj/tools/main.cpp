#include <iostream>

#include "sensboot/cli.hpp"

int main(int argc, char** argv) {
  return sensboot::run_cli(argc, argv, std::cout, std::cerr);
}
