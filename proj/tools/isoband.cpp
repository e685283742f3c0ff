#include <iostream>

#include "isoband/cli.hpp"

int main(int argc, char** argv) { return isoband::run_cli(argc, argv, std::cout, std::cerr); }
