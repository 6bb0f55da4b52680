#include <iostream>

#include "openkrotov/commands.hpp"

int main(int argc, char** argv) { return openkrotov::run_cli(argc, argv, std::cout, std::cerr); }
