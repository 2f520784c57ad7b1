#include <iostream>
#include <string>
#include <vector>

#include "vwgen/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return vw::cli::run(args, std::cout, std::cerr);
}
