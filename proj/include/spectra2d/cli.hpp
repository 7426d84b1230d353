#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "spectra2d/admm.hpp"
#include "spectra2d/experiment.hpp"

namespace spectra2d {

enum class Command { synth, solve, phase, bench, demo_large };

std::string_view to_string(Command c) noexcept;
Command command_from_string(std::string_view s);

struct RunPaths {
    std::filesystem::path out_dir = ".";
    std::optional<std::filesystem::path> signal;        // input signal JSON
    std::optional<std::filesystem::path> observations;  // input observation JSON

    friend bool operator==(const RunPaths&, const RunPaths&) = default;
};

struct RunConfig {
    Command command = Command::solve;
    SolverConfig solver;
    std::optional<PhaseGridSpec> experiment;
    RunPaths paths;
    std::uint64_t seed = 0;
    int n = 50;
    int s = 5;
    int m = 500;
    unsigned jobs = 0;  // 0 = all cores

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

nlohmann::json to_json(const RunConfig& cfg);
/// Rejects unknown keys.
RunConfig run_config_from_json(const nlohmann::json& j);

/// Usage/config problems. `exit_code` is 0 for --help, 2 otherwise.
class CliError : public std::runtime_error {
public:
    CliError(std::string message, int exit_code) : std::runtime_error(std::move(message)), exit_code_(exit_code) {}
    [[nodiscard]] int exit_code() const noexcept { return exit_code_; }

private:
    int exit_code_;
};

inline constexpr const char* kEnvPrefix = "SPECTRA2D_";

/// Precedence: command-line flag > SPECTRA2D_<FLAG> environment variable >
/// --config JSON > built-in defaults.
RunConfig parse_cli(const std::vector<std::string>& argv);

/// Parses "a,b,c" or "start:stop:step" (inclusive).
std::vector<int> parse_int_list(const std::string& text);

/// Executes the command, writing outputs under cfg.paths.out_dir.
/// Returns 0 on success, 1 on solver failure, 2 on configuration error.
int run(const RunConfig& cfg);

}  // namespace spectra2d
