#include <iostream>

#include "qineq_cli.hpp"

int main(int argc, char** argv) { return qineq::cli::run(argc, argv, std::cout, std::cerr); }
