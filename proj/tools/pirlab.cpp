#include <iostream>

#include "pirlab/cli.hpp"

int main(int argc, char** argv) { return pir::cli::run(argc, argv, std::cout, std::cerr); }
