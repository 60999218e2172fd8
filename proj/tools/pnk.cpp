#include <iostream>

#include "pnk/cli.hpp"

int main(int argc, char** argv) { return pnk::cli::run_cli(argc, argv, std::cout, std::cerr); }
