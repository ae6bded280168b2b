#include <iostream>

#include "u21/cli.hpp"

int main(int argc, char** argv) {
    return u21::cli::run(argc, argv, std::cout, std::cerr);
}
