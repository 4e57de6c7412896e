#include "inpr/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return inpr::cli::run(argc, argv, std::cout, std::cerr); }
