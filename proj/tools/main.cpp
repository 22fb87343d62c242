#include <iostream>

#include "rbocoop/cli.hpp"

int main(int argc, char** argv) { return rbocoop::run_cli(argc, argv, std::cout, std::cerr); }
