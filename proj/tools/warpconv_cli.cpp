#include <iostream>

#include "warpconv/cli.hpp"

int main(int argc, char** argv) {
    return warpconv::cli_main(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
