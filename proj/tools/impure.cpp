#include <iostream>

#include "impure/cli.hpp"

int main(int argc, char** argv) { return impure::cli::run(argc, argv, std::cout, std::cerr); }
