#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <unistd.h>

#include "cli.hpp"

int main(int argc, char** argv) {
    std::ios::sync_with_stdio(false);
    const bool color = std::getenv("NO_COLOR") == nullptr && isatty(STDERR_FILENO) == 1;
    std::vector<std::string> args(argv + 1, argv + argc);
    return augury::cli::run(args, std::cin, std::cout, std::cerr, color);
}
