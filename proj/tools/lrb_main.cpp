#include <string>
#include <vector>

#include "lrb/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return lrb::cli_execute(args);
}
