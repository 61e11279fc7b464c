#include "alloy/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return alloy::cli::run(argc, argv, std::cout, std::cerr); }
