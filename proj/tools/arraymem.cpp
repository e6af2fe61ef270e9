#include <iostream>

#include "arraymem/cli.hpp"

int main(int argc, char** argv) { return arraymem::cli_main(argc, argv, std::cout, std::cerr); }
