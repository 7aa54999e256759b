#include <iostream>

#include "vulnpricer/cli_io.hpp"

int main(int argc, char** argv) { return vulnpricer::run(argc, argv, std::cout, std::cerr); }
