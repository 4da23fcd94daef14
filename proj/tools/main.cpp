#include <iostream>

#include "slackwise/cli/commands.hpp"

int main(int argc, char** argv) {
  return slackwise::cli::run_cli(argc, argv, std::cout, std::cerr);
}
