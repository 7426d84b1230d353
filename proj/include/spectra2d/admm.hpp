#pragma once

// ADMM for the Toeplitz-constrained trace-minimization SDP
//
//   min trace(M)  s.t.  M >= 0,  M = N,  N = [[T1, X], [X^H, T2]] feasible
//
// with scaled dual U. The nuclear variant drops the Toeplitz constraint on
// the diagonal blocks. Optional fast ADMM (Nesterov momentum on (N, U) with
// a combined-residual restart).

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "spectra2d/projections.hpp"
#include "spectra2d/signal_model.hpp"

namespace spectra2d {

struct SolverConfig {
    double rho = 0.1;
    double eps_abs = 1e-5;
    double eps_rel = 1e-5;
    int max_iters = 20000;
    Variant variant = Variant::toeplitz;
    bool accelerate = false;
    double restart_eta = 0.999;
    /// Abort when r_norm grows beyond this multiple of its first value.
    double divergence_factor = 1e6;
    /// Keep one history row every `history_stride` iterations (the final
    /// iterate is always kept).
    int history_stride = 1;

    void validate() const;
    friend bool operator==(const SolverConfig&, const SolverConfig&) = default;
};

nlohmann::json to_json(const SolverConfig& cfg);
SolverConfig solver_config_from_json(const nlohmann::json& j);

struct TraceRow {
    int iter = 0;
    double objective = 0.0;  // trace(M)
    double r_norm = 0.0;
    double s_norm = 0.0;
};

struct AdmmState {
    int n = 0;
    CMatrix M, N, U;
    int iter = 0;
    double r_norm = 0.0;
    double s_norm = 0.0;
    double first_r_norm = 0.0;
    std::vector<TraceRow> history;

    // Fast ADMM carry: extrapolated (N, U) fed to the next M-update, the
    // previous (N, U), momentum and last combined residual.
    CMatrix N_hat, U_hat, N_prev, U_prev;
    double alpha = 1.0;
    double combined_residual = 0.0;
    int restarts = 0;

    [[nodiscard]] double objective() const { return M.trace().real(); }
    [[nodiscard]] CMatrix recovered() const { return N.topRightCorner(n, n); }
};

struct RecoveryResult {
    CMatrix X_rec;
    CMatrix T1, T2;  // diagonal blocks of the final N
    std::optional<double> rel_error;
    int iters = 0;
    double wall_time = 0.0;  // seconds, solve() only
    bool converged = false;
    double final_r = 0.0;
    double final_s = 0.0;
    double objective = 0.0;
    int restarts = 0;
    std::vector<TraceRow> history;
};

/// Thrown when an iterate becomes non-finite or the primal residual blows up.
class DivergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

AdmmState init_state(const ObservationSet& obs, const SolverConfig& cfg);

/// One plain ADMM iteration (M-, N-, U-updates) using state.N and state.U
/// as the previous iterates.
void admm_step(AdmmState& state, const ObservationSet& obs, const SolverConfig& cfg);

/// Stopping test on the current residuals and iterates.
bool check_stop(const AdmmState& state, const SolverConfig& cfg);

struct StopThresholds {
    double primal = 0.0;
    double dual = 0.0;
};
StopThresholds stop_thresholds(const AdmmState& state, const SolverConfig& cfg);

RecoveryResult solve(const ObservationSet& obs, const SolverConfig& cfg,
                     const std::optional<SpectralSignal>& truth = std::nullopt);
RecoveryResult solve(const ObservationSet& obs, const SolverConfig& cfg, const CMatrix* truth);

/// Number of eigenvalues above tol * largest eigenvalue. For a recovered
/// PSD Toeplitz block this is the Vandermonde-decomposition rank.
int toeplitz_rank_estimate(const CMatrix& tblock, double tol);

void write_trace_csv(const std::vector<TraceRow>& history, const std::filesystem::path& path);
std::string trace_csv(const std::vector<TraceRow>& history);

}  // namespace spectra2d
