#include <iostream>

#include "irsa/cli/commands.hpp"

int main(int argc, char** argv) { return irsa::cli::run(argc, argv, std::cout, std::cerr); }
