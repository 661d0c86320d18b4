#include <iostream>

#include "ragdepth/cli.hpp"

int main(int argc, char** argv) { return ragdepth::cli::run(argc, argv, std::cout); }
