#include "pnp/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return pnp::run_cli(argc, argv, std::cout, std::cerr); }
