#include <iostream>

#include "clear/cli.hpp"

int main(int argc, char** argv) {
    return clear::cli::run(argc, argv, std::cout, std::cerr);
}
