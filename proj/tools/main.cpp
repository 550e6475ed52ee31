#include <iostream>

#include "pia/cli/cli.hpp"

int main(int argc, char** argv) { return pia::cli::run(argc, argv, std::cout, std::cerr); }
