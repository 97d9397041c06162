#include <iostream>

#include "hlab/cli/commands.hpp"

int main(int argc, char** argv) { return hlab::cli::run_cli(argc, argv, std::cout, std::cerr); }
