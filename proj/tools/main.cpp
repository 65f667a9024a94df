#include <iostream>
#include <string>
#include <vector>

#include "bchain/cli.hpp"

int main(int argc, char** argv) {
  return bchain::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
