#include <iostream>

#include "seqeq/cli.hpp"

int main(int argc, char** argv) { return seqeq::run_cli(argc, argv, std::cout, std::cerr); }
