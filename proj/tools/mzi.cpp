#include <iostream>

#include "mzi/cli.hpp"

int main(int argc, char** argv) { return mzi::cli::run(argc, argv, std::cout, std::cerr); }
