#include <iostream>

#include "drisk/cli.hpp"

int main(int argc, char** argv) { return drisk::cli::run(argc, argv, std::cout, std::cerr); }
