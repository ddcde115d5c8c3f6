#include <string>
#include <vector>

#include <esmml/cli.hpp>

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return esmml::cli::dispatch(std::move(args));
}
