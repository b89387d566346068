#include <iostream>

#include "erw/cli.hpp"

int main(int argc, char** argv) { return erw::cli::run(argc, argv, std::cout, std::cerr); }
