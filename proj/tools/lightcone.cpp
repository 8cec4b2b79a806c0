#include <iostream>

#include "lightcone/cli.hpp"

int main(int argc, char** argv) { return lightcone::run(argc, argv, std::cout, std::cerr); }
