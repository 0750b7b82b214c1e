#include <iostream>

#include "co2proxy/cli.hpp"

int main(int argc, char** argv) { return co2proxy::cli::run(argc, argv, std::cout, std::cerr); }
