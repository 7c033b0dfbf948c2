#include <vector>

#include "mmot/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return mmot::run_cli(args);
}
