#include <iostream>
#include <string>
#include <vector>

#include "spectra2d/cli.hpp"

int main(int argc, char** argv) {
    const std::vector<std::string> args(argv + 1, argv + argc);
    try {
        return spectra2d::run(spectra2d::parse_cli(args));
    } catch (const spectra2d::CliError& e) {
        (e.exit_code() == 0 ? std::cout : std::cerr) << e.what() << '\n';
        return e.exit_code();
    }
}
