#include <iostream>

#include "prodgeo/cli.hpp"

int main(int argc, char** argv) { return prodgeo::cli::run(argc, argv, std::cout, std::cerr); }
