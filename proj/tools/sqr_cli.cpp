#include <iostream>

#include "sqr/cli.hpp"

int main(int argc, char** argv) { return sqr::cli::parse_and_dispatch(argc, argv, std::cout, std::cerr); }
