#include <iostream>

#include "tailcouple/cli.hpp"

int main(int argc, char** argv) {
  return tailcouple::run_cli(argc, argv, std::cout, std::cerr);
}
