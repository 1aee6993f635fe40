#include <iostream>

#include "nimbus/cli.hpp"

int main(int argc, char** argv) { return nimbus::cli::main(argc, argv, std::cout, std::cerr); }
