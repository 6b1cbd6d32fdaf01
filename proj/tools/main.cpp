#include <iostream>

#include "emdenflow/cli/commands.hpp"

int main(int argc, char** argv) { return emdenflow::cli::run(argc, argv, std::cout, std::cerr); }
