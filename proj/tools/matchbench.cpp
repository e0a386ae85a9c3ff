#include <iostream>

#include "matchbench/cli.hpp"

int main(int argc, char** argv) { return matchbench::cli::run(argc, argv, std::cout, std::cerr); }
