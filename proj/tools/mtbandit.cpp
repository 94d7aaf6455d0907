#include <iostream>

#include "mtbandit/commands.hpp"

int main(int argc, char** argv) { return mtbandit::run_cli(argc, argv, std::cout, std::cerr); }
