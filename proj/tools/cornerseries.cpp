#include <iostream>

#include "corner/cli/commands.hpp"

int main(int argc, char **argv) { return corner::cli::run_cli(argc, argv, std::cout, std::cerr); }
