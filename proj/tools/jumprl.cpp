#include <iostream>

#include "jumprl/cli.hpp"

int main(int argc, char** argv) {
    return jumprl::cli::run(argc, argv, std::cout, std::cerr);
}
