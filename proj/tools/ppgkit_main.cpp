#include <iostream>

#include "ppgkit/cli.hpp"

int main(int argc, char** argv) { return ppgkit::cli_main(argc, argv, std::cout, std::cerr); }
