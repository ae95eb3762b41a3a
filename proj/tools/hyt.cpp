#include <iostream>

#include "hyt/cli/commands.hpp"

int main(int argc, char** argv) { return hyt::cli::run(argc, argv, std::cout, std::cerr); }
