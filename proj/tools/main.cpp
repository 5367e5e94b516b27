#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) { return chirp2d::cli::run_cli(argc, argv, std::cout, std::cerr); }
