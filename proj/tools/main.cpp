#include <iostream>

#include "tcps/cli/cli.hpp"

int main(int argc, char** argv) {
  return tcps::cli::run_command(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
