#include <string>
#include <vector>

#include "digest/cli.hpp"

int main(int argc, char** argv) {
    return digest::cli::run(std::vector<std::string>(argv + 1, argv + argc));
}
