#include <iostream>

#include "annodiff/cli.hpp"

int main(int argc, char** argv) { return annodiff::cli::run(argc, argv, std::cout, std::cerr); }
