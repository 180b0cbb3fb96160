#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) { return bht::cli_main(argc, argv, std::cerr); }
