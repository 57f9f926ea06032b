#include <iostream>

#include "spdemove/cli.hpp"

int main(int argc, char** argv) { return spdemove::cli::dispatch(argc, argv, std::cerr); }
