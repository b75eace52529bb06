#include <iostream>

#include "latflow/cli.hpp"

int main(int argc, char** argv) { return latflow::cli::main(argc, argv, std::cout, std::cerr); }
