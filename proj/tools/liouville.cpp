#include <iostream>

#include "liouville/cli.hpp"

int main(int argc, char** argv) {
    return liouville::cli::run({argv + 1, argv + argc}, std::cout, std::cerr);
}
