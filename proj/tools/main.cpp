#include <iostream>

#include "tsdyn/cli.hpp"

int main(int argc, char** argv) { return tsdyn::io::run_cli(argc, argv, std::cout, std::cerr); }
