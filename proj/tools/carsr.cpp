#include <iostream>
#include <string>
#include <vector>

#include "carsr/commands.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return carsr::cli::run_cli(args, std::cout, std::cerr);
}
