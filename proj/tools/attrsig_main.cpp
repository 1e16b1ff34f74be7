#include <iostream>

#include "attrsig/cli.hpp"

int main(int argc, char** argv) {
  return attrsig::cli::run(argc, argv, std::cin, std::cout, std::cerr);
}
