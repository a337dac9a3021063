#include <iostream>

#include "aqx/commands.hpp"

int main(int argc, char** argv) { return aqx::run_cli(argc, argv, std::cout, std::cerr); }
