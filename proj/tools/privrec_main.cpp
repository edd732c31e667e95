#include <iostream>

#include "privrec/cli.hpp"

int main(int argc, char** argv) { return privrec::run_cli(argc, argv, std::cout, std::cerr); }
