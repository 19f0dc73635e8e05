#include <iostream>

#include "finadv/cli.hpp"

int main(int argc, char** argv) { return finadv::run_cli(argc, argv, std::cout, std::cerr); }
