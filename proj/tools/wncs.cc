#include <iostream>

#include "cli/commands.h"

int main(int argc, char** argv) {
  return wncs::cli::Run(argc, argv, std::cout, std::cerr);
}
