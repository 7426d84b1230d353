#include "spectra2d/admm.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "spectra2d/hermitian_eig.hpp"

namespace spectra2d {

void SolverConfig::validate() const {
    if (!(rho > 0.0)) throw std::invalid_argument("solver: rho must be positive");
    if (!(eps_abs > 0.0) || !(eps_rel > 0.0)) throw std::invalid_argument("solver: tolerances must be positive");
    if (max_iters < 1) throw std::invalid_argument("solver: max_iters must be >= 1");
    if (!(restart_eta > 0.0 && restart_eta < 1.0)) throw std::invalid_argument("solver: restart_eta must lie in (0,1)");
    if (!(divergence_factor > 1.0)) throw std::invalid_argument("solver: divergence_factor must exceed 1");
    if (history_stride < 1) throw std::invalid_argument("solver: history_stride must be >= 1");
}

nlohmann::json to_json(const SolverConfig& cfg) {
    return {{"rho", cfg.rho},
            {"eps_abs", cfg.eps_abs},
            {"eps_rel", cfg.eps_rel},
            {"max_iters", cfg.max_iters},
            {"variant", std::string(to_string(cfg.variant))},
            {"accelerate", cfg.accelerate},
            {"restart_eta", cfg.restart_eta},
            {"divergence_factor", cfg.divergence_factor},
            {"history_stride", cfg.history_stride}};
}

SolverConfig solver_config_from_json(const nlohmann::json& j) {
    SolverConfig cfg;
    for (const auto& [key, value] : j.items()) {
        if (key == "rho") cfg.rho = value.get<double>();
        else if (key == "eps_abs") cfg.eps_abs = value.get<double>();
        else if (key == "eps_rel") cfg.eps_rel = value.get<double>();
        else if (key == "max_iters") cfg.max_iters = value.get<int>();
        else if (key == "variant") cfg.variant = variant_from_string(value.get<std::string>());
        else if (key == "accelerate") cfg.accelerate = value.get<bool>();
        else if (key == "restart_eta") cfg.restart_eta = value.get<double>();
        else if (key == "divergence_factor") cfg.divergence_factor = value.get<double>();
        else if (key == "history_stride") cfg.history_stride = value.get<int>();
        else throw std::invalid_argument("solver config: unknown key '" + key + "'");
    }
    cfg.validate();
    return cfg;
}

AdmmState init_state(const ObservationSet& obs, const SolverConfig& cfg) {
    obs.validate();
    cfg.validate();
    const int n = obs.n;
    AdmmState st;
    st.n = n;
    st.M = CMatrix::Zero(2 * n, 2 * n);
    st.U = CMatrix::Zero(2 * n, 2 * n);
    CMatrix z = CMatrix::Zero(2 * n, 2 * n);
    apply_data_consistency(z.topRightCorner(n, n), obs);
    st.N = feasible_project(z, obs, cfg.variant).data();
    st.N_hat = st.N;
    st.U_hat = st.U;
    st.N_prev = st.N;
    st.U_prev = st.U;
    return st;
}

namespace {

// One M/N/U sweep from the given (N_in, U_in). Fills residuals.
void sweep(AdmmState& st, const CMatrix& n_in, const CMatrix& u_in, const ObservationSet& obs,
           const SolverConfig& cfg) {
    CMatrix m_next;
    try {
        m_next = psd_trace_prox(symmetrize(n_in - u_in), cfg.rho);
    } catch (const std::runtime_error& e) {
        throw DivergenceError(std::string("M-update failed at iteration ") + std::to_string(st.iter + 1) + ": " +
                              e.what());
    }
    CMatrix n_next = feasible_project(m_next + u_in, obs, cfg.variant).data();
    CMatrix u_next = u_in + m_next - n_next;

    st.r_norm = (m_next - n_next).norm();
    st.s_norm = cfg.rho * (n_in - n_next).norm();
    st.N_prev = std::move(st.N);
    st.U_prev = std::move(st.U);
    st.M = std::move(m_next);
    st.N = std::move(n_next);
    st.U = std::move(u_next);
    ++st.iter;

    if (!std::isfinite(st.r_norm) || !std::isfinite(st.s_norm) || !st.U.allFinite())
        throw DivergenceError("non-finite iterate at iteration " + std::to_string(st.iter));
    if (st.iter == 1) st.first_r_norm = st.r_norm;
    if (st.first_r_norm > 0.0 && st.r_norm > cfg.divergence_factor * st.first_r_norm)
        throw DivergenceError("primal residual exceeded divergence bound at iteration " + std::to_string(st.iter));
}

void record(AdmmState& st, const SolverConfig& cfg, bool force) {
    if (force || st.iter % cfg.history_stride == 0) {
        if (!st.history.empty() && st.history.back().iter == st.iter) return;
        st.history.push_back({st.iter, st.objective(), st.r_norm, st.s_norm});
    }
}

void accelerated_step(AdmmState& st, const ObservationSet& obs, const SolverConfig& cfg) {
    const CMatrix n_hat = st.N_hat;
    const CMatrix u_hat = st.U_hat;
    sweep(st, n_hat, u_hat, obs, cfg);

    // rho ||U - U_hat||^2 + rho ||N - N_hat||^2 (scaled-dual form of the
    // combined primal/dual residual); U - U_hat = M - N.
    const double c = cfg.rho * (st.M - st.N).squaredNorm() + cfg.rho * (st.N - n_hat).squaredNorm();
    if (st.iter == 1 || c < cfg.restart_eta * st.combined_residual) {
        const double alpha_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * st.alpha * st.alpha));
        const double w = (st.alpha - 1.0) / alpha_next;
        st.N_hat = st.N + w * (st.N - st.N_prev);
        st.U_hat = st.U + w * (st.U - st.U_prev);
        st.alpha = alpha_next;
        st.combined_residual = c;
    } else {
        // Restart: drop momentum and take the next step from the previous
        // iterate; the residual bar is relaxed by 1/eta.
        st.alpha = 1.0;
        st.N_hat = st.N_prev;
        st.U_hat = st.U_prev;
        st.combined_residual /= cfg.restart_eta;
        ++st.restarts;
    }
}

}  // namespace

void admm_step(AdmmState& state, const ObservationSet& obs, const SolverConfig& cfg) {
    const CMatrix n_prev = state.N;
    const CMatrix u_prev = state.U;
    sweep(state, n_prev, u_prev, obs, cfg);
    state.N_hat = state.N;
    state.U_hat = state.U;
    record(state, cfg, false);
}

StopThresholds stop_thresholds(const AdmmState& state, const SolverConfig& cfg) {
    const double base = 2.0 * state.n * cfg.eps_abs;
    return {base + cfg.eps_rel * std::max(state.M.norm(), state.N.norm()),
            base + cfg.eps_rel * (cfg.rho * state.U).norm()};
}

bool check_stop(const AdmmState& state, const SolverConfig& cfg) {
    const StopThresholds t = stop_thresholds(state, cfg);
    return state.r_norm <= t.primal && state.s_norm <= t.dual;
}

RecoveryResult solve(const ObservationSet& obs, const SolverConfig& cfg, const CMatrix* truth) {
    const auto t0 = std::chrono::steady_clock::now();
    AdmmState st = init_state(obs, cfg);

    RecoveryResult res;
    double best_score = std::numeric_limits<double>::infinity();
    CMatrix best_x;
    while (st.iter < cfg.max_iters) {
        if (cfg.accelerate) {
            accelerated_step(st, obs, cfg);
            record(st, cfg, false);
        } else {
            admm_step(st, obs, cfg);
        }
        if (check_stop(st, cfg)) {
            res.converged = true;
            break;
        }
        const StopThresholds t = stop_thresholds(st, cfg);
        const double score = std::max(st.r_norm / t.primal, st.s_norm / t.dual);
        if (score < best_score) {
            best_score = score;
            best_x = st.recovered();
        }
    }
    record(st, cfg, true);

    res.X_rec = res.converged || best_x.size() == 0 ? st.recovered() : best_x;
    res.T1 = st.N.topLeftCorner(st.n, st.n);
    res.T2 = st.N.bottomRightCorner(st.n, st.n);
    res.iters = st.iter;
    res.final_r = st.r_norm;
    res.final_s = st.s_norm;
    res.objective = st.objective();
    res.restarts = st.restarts;
    res.history = std::move(st.history);
    res.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (truth) res.rel_error = relative_error(res.X_rec, *truth);
    return res;
}

RecoveryResult solve(const ObservationSet& obs, const SolverConfig& cfg, const std::optional<SpectralSignal>& truth) {
    if (!truth) return solve(obs, cfg, static_cast<const CMatrix*>(nullptr));
    if (truth->n != obs.n) throw std::invalid_argument("solve: ground truth size does not match observations");
    const CMatrix dense = truth->dense();
    return solve(obs, cfg, &dense);
}

int toeplitz_rank_estimate(const CMatrix& tblock, double tol) {
    if (tblock.rows() != tblock.cols()) throw std::invalid_argument("toeplitz_rank_estimate: matrix must be square");
    if (hermitian_defect(tblock) > 1e-9 * std::max(1.0, tblock.norm()))
        throw std::invalid_argument("toeplitz_rank_estimate: matrix is not Hermitian");
    const Eigen::VectorXd ev = hermitian_eigenvalues(tblock);
    if (ev.size() == 0) return 0;
    const double top = ev.maxCoeff();
    if (!(top > 0.0)) return 0;
    return static_cast<int>((ev.array() > tol * top).count());
}

std::string trace_csv(const std::vector<TraceRow>& history) {
    std::ostringstream os;
    os.precision(17);
    os << "iter,objective,r_norm,s_norm\n";
    for (const auto& r : history) os << r.iter << ',' << r.objective << ',' << r.r_norm << ',' << r.s_norm << '\n';
    return os.str();
}

void write_trace_csv(const std::vector<TraceRow>& history, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string());
    out << trace_csv(history);
}

}  // namespace spectra2d
