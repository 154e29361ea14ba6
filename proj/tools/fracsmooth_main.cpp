#include "fracsmooth/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return fracsmooth::cli::run(argc, argv, std::cout, std::cerr); }
