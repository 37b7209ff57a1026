#include <iostream>

#include "hsd_cli/cli.hpp"

int main(int argc, char** argv) { return hsd::cli::run(argc, argv, std::cout, std::cerr); }
