#include <iostream>

#include "dispcert/cli.hpp"

int main(int argc, char** argv) { return dispcert::run_cli(argc, argv, std::cout, std::cerr); }
