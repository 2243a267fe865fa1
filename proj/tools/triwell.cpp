#include "triwell/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return triwell::cli::run(argc, argv, std::cout, std::cerr); }
