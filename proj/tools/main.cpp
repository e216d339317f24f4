#include "specbreak/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return specbreak::run_cli(argc, argv, std::cout, std::cerr); }
