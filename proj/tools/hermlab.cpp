#include "hermlab/cli.hpp"

int main(int argc, char** argv) { return hermlab::cli::run(argc, argv, std::cout, std::cerr); }
