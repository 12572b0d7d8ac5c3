#include <iostream>

#include "swapfit/cli.hpp"

int main(int argc, char** argv) { return swapfit::run_cli(argc, argv, std::cout, std::cerr); }
