#include <iostream>

#include "qttcirc/cli.hpp"

int main(int argc, char** argv) { return qttcirc::cli_main(argc, argv, std::cout, std::cerr); }
