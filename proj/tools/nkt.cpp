#include <iostream>

#include "nkt/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return nkt::cli::run(args, std::cout, std::cerr);
}
