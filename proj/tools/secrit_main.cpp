#include <iostream>

#include "secrit/cli.hpp"

int main(int argc, char** argv) { return secrit::run_cli(argc, argv, std::cin, std::cout, std::cerr); }
