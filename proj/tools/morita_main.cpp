#include <iostream>

#include "morita/cli.hpp"

int main(int argc, char** argv) {
  return morita::run({argv + 1, argv + argc}, std::cout, std::cerr);
}
