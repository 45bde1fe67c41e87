#include <iostream>

#include "selberg/cli.hpp"

int main(int argc, char** argv) { return selberg::cli::run(argc, argv, std::cout, std::cerr); }
