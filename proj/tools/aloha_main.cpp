#include <iostream>

#include "aloha/cli.hpp"

int main(int argc, char** argv) { return aloha::run_cli(argc, argv, std::cout, std::cerr); }
