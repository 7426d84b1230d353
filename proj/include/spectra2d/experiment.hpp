#pragma once

// Monte-Carlo experiments: single trials, m-vs-s phase grids, runtime
// benches and their CSV/PGM/JSON outputs.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "spectra2d/admm.hpp"

namespace spectra2d {

inline constexpr double kSuccessThreshold = 1e-3;

struct TrialOutcome {
    bool success = false;
    std::uint64_t seed = 0;
    RecoveryResult result;
    std::string error;  // non-empty when the solver diverged
};

/// Signal and observation seeds both derive from `seed`.
std::uint64_t signal_seed(std::uint64_t trial_seed);
std::uint64_t observation_seed(std::uint64_t trial_seed);

/// Synthesize (n, s) from seed, observe m entries, solve, and judge success
/// by relative error <= 1e-3. Divergence counts as failure.
TrialOutcome run_trial(int n, int s, int m, std::uint64_t seed, const SolverConfig& cfg);

struct PhaseGridSpec {
    int n = 50;
    std::vector<int> m_values;
    std::vector<int> s_values;
    int trials = 20;
    std::uint64_t base_seed = 0;
    Variant variant = Variant::toeplitz;

    void validate() const;
    friend bool operator==(const PhaseGridSpec&, const PhaseGridSpec&) = default;
};

nlohmann::json to_json(const PhaseGridSpec& spec);
PhaseGridSpec phase_spec_from_json(const nlohmann::json& j);

/// Per-cell trial seed; independent of the variant so both variants see
/// identical instances.
std::uint64_t cell_seed(std::uint64_t base_seed, int m, int s, int trial);

struct TrialRecord {
    int m = 0;
    int s = 0;
    int trial = 0;
    std::uint64_t seed = 0;
    bool success = false;
    double rel_error = 0.0;
    int iters = 0;
    double wall_time = 0.0;
    bool converged = false;
};

struct PhaseGridResult {
    PhaseGridSpec spec;
    // Indexed [m index][s index].
    std::vector<std::vector<int>> counts;
    std::vector<std::vector<double>> mean_rel_error;
    std::vector<std::vector<double>> mean_iters;
    std::vector<std::vector<double>> mean_wall_time;
    // Row-major over (m, s, trial).
    std::vector<TrialRecord> trials;

    [[nodiscard]] const TrialRecord& trial(std::size_t mi, std::size_t si, int t) const;
};

/// Runs every (m, s, trial) cell on `jobs` worker threads (0 = hardware
/// concurrency). The result does not depend on `jobs`.
PhaseGridResult run_phase_grid(const PhaseGridSpec& spec, const SolverConfig& cfg, unsigned jobs = 0);

/// Fraction of cells where `a`'s count is >= `b`'s.
double cell_dominance_rate(const PhaseGridResult& a, const PhaseGridResult& b);
/// Fraction of matched trials where `b` succeeded but `a` failed.
double per_seed_violation_rate(const PhaseGridResult& a, const PhaseGridResult& b);
/// Fraction of adjacent m pairs (per s column) with non-decreasing counts.
double monotonicity_rate(const PhaseGridResult& r);
/// Smallest m in column `si` whose count equals the trial count.
std::optional<int> smallest_full_success_m(const PhaseGridResult& r, std::size_t si = 0);

struct BenchRow {
    int n = 0;
    int m = 0;
    int s = 0;
    double wall_time = 0.0;
    double rel_error = 0.0;
    int iters = 0;
    bool success = false;
    bool converged = false;
};

/// The (n, m) rows used for runtime comparison at s = 5.
std::vector<std::pair<int, int>> bench_preset();

std::vector<BenchRow> run_bench(const std::vector<std::pair<int, int>>& sizes, int s, const SolverConfig& cfg,
                                std::uint64_t base_seed = 0);
std::string bench_csv(const std::vector<BenchRow>& rows);

/// Round-half-up of 255 * count / trials.
int gray_level(int count, int trials);

/// Writes `<stem>.csv` (header row of s values, first column m values) and
/// `<stem>.pgm` (binary P5, rows = ascending m, columns = ascending s).
void emit_phase_plot(const PhaseGridResult& result, const std::filesystem::path& stem);
std::string counts_csv(const PhaseGridResult& result);
std::string phase_pgm(const PhaseGridResult& result);

nlohmann::json to_json(const PhaseGridResult& result);

/// 16-hex-digit FNV-1a digest of a JSON document's compact dump.
std::string content_hash(const nlohmann::json& doc);

}  // namespace spectra2d
