#include <iostream>
#include <string>
#include <vector>

#include "doccit2vec/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return dc2v::cli::run(args, std::cin, std::cout, std::cerr);
}
