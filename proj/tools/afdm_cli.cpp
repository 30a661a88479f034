#include "afdm/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return afdm::cli::run(argc, argv, std::cout, std::cerr); }
