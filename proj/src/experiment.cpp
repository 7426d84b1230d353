#include "spectra2d/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "spectra2d/seeding.hpp"

namespace spectra2d {

std::uint64_t signal_seed(std::uint64_t trial_seed) { return derive_seed(trial_seed, {0}); }
std::uint64_t observation_seed(std::uint64_t trial_seed) { return derive_seed(trial_seed, {1}); }

TrialOutcome run_trial(int n, int s, int m, std::uint64_t seed, const SolverConfig& cfg) {
    if (m < 1 || static_cast<std::int64_t>(m) > static_cast<std::int64_t>(n) * n)
        throw std::invalid_argument("run_trial: m must lie in [1, n^2]");
    const SpectralSignal sig = synth_random(n, s, signal_seed(seed));
    const CMatrix truth = sig.dense();
    const ObservationSet obs = sample_observations(truth, m, observation_seed(seed));

    TrialOutcome out;
    out.seed = seed;
    try {
        out.result = solve(obs, cfg, &truth);
        out.success = *out.result.rel_error <= kSuccessThreshold;
    } catch (const DivergenceError& e) {
        out.error = e.what();
        out.success = false;
        out.result.rel_error = std::numeric_limits<double>::infinity();
    }
    return out;
}

void PhaseGridSpec::validate() const {
    if (n < 1) throw std::invalid_argument("phase grid: n must be >= 1");
    if (trials < 1) throw std::invalid_argument("phase grid: trials must be >= 1");
    if (m_values.empty() || s_values.empty()) throw std::invalid_argument("phase grid: empty m or s list");
    for (int m : m_values)
        if (m < 1 || static_cast<std::int64_t>(m) > static_cast<std::int64_t>(n) * n)
            throw std::invalid_argument("phase grid: m values must lie in [1, n^2]");
    for (int s : s_values)
        if (s < 1 || (s > 1 && 2 * s > n)) throw std::invalid_argument("phase grid: s values must lie in [1, n/2]");
}

nlohmann::json to_json(const PhaseGridSpec& spec) {
    return {{"n", spec.n},
            {"m_values", spec.m_values},
            {"s_values", spec.s_values},
            {"trials", spec.trials},
            {"base_seed", spec.base_seed},
            {"variant", std::string(to_string(spec.variant))}};
}

PhaseGridSpec phase_spec_from_json(const nlohmann::json& j) {
    PhaseGridSpec spec;
    for (const auto& [key, value] : j.items()) {
        if (key == "n") spec.n = value.get<int>();
        else if (key == "m_values") spec.m_values = value.get<std::vector<int>>();
        else if (key == "s_values") spec.s_values = value.get<std::vector<int>>();
        else if (key == "trials") spec.trials = value.get<int>();
        else if (key == "base_seed") spec.base_seed = value.get<std::uint64_t>();
        else if (key == "variant") spec.variant = variant_from_string(value.get<std::string>());
        else throw std::invalid_argument("phase grid: unknown key '" + key + "'");
    }
    return spec;
}

std::uint64_t cell_seed(std::uint64_t base_seed, int m, int s, int trial) {
    return derive_seed(base_seed, {static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(s),
                                   static_cast<std::uint64_t>(trial)});
}

const TrialRecord& PhaseGridResult::trial(std::size_t mi, std::size_t si, int t) const {
    return trials.at((mi * spec.s_values.size() + si) * static_cast<std::size_t>(spec.trials) + t);
}

PhaseGridResult run_phase_grid(const PhaseGridSpec& spec, const SolverConfig& cfg, unsigned jobs) {
    spec.validate();
    SolverConfig trial_cfg = cfg;
    trial_cfg.variant = spec.variant;
    trial_cfg.validate();

    const std::size_t nm = spec.m_values.size(), ns = spec.s_values.size();
    const auto nt = static_cast<std::size_t>(spec.trials);
    PhaseGridResult res;
    res.spec = spec;
    res.trials.resize(nm * ns * nt);

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t idx = next++; idx < res.trials.size(); idx = next++) {
            const std::size_t mi = idx / (ns * nt), si = (idx / nt) % ns;
            const int t = static_cast<int>(idx % nt);
            TrialRecord& rec = res.trials[idx];
            rec.m = spec.m_values[mi];
            rec.s = spec.s_values[si];
            rec.trial = t;
            rec.seed = cell_seed(spec.base_seed, rec.m, rec.s, t);
            try {
                const TrialOutcome out = run_trial(spec.n, rec.s, rec.m, rec.seed, trial_cfg);
                rec.success = out.success;
                rec.rel_error = *out.result.rel_error;
                rec.iters = out.result.iters;
                rec.wall_time = out.result.wall_time;
                rec.converged = out.result.converged;
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = res.trials.size();
            }
        }
    };

    if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
    jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, res.trials.size()));
    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned i = 0; i < jobs; ++i) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);

    res.counts.assign(nm, std::vector<int>(ns, 0));
    res.mean_rel_error.assign(nm, std::vector<double>(ns, 0.0));
    res.mean_iters.assign(nm, std::vector<double>(ns, 0.0));
    res.mean_wall_time.assign(nm, std::vector<double>(ns, 0.0));
    for (std::size_t mi = 0; mi < nm; ++mi)
        for (std::size_t si = 0; si < ns; ++si)
            for (int t = 0; t < spec.trials; ++t) {
                const TrialRecord& rec = res.trial(mi, si, t);
                res.counts[mi][si] += rec.success ? 1 : 0;
                res.mean_rel_error[mi][si] += rec.rel_error / spec.trials;
                res.mean_iters[mi][si] += static_cast<double>(rec.iters) / spec.trials;
                res.mean_wall_time[mi][si] += rec.wall_time / spec.trials;
            }
    return res;
}

namespace {

void require_matched(const PhaseGridResult& a, const PhaseGridResult& b) {
    if (a.spec.n != b.spec.n || a.spec.m_values != b.spec.m_values || a.spec.s_values != b.spec.s_values ||
        a.spec.trials != b.spec.trials || a.spec.base_seed != b.spec.base_seed)
        throw std::invalid_argument("grids are not matched (n, m, s, trials and seed must agree)");
}

}  // namespace

double cell_dominance_rate(const PhaseGridResult& a, const PhaseGridResult& b) {
    require_matched(a, b);
    std::size_t ok = 0, total = 0;
    for (std::size_t mi = 0; mi < a.counts.size(); ++mi)
        for (std::size_t si = 0; si < a.counts[mi].size(); ++si, ++total) ok += a.counts[mi][si] >= b.counts[mi][si];
    return total ? static_cast<double>(ok) / total : 1.0;
}

double per_seed_violation_rate(const PhaseGridResult& a, const PhaseGridResult& b) {
    require_matched(a, b);
    std::size_t bad = 0, matched = 0;
    for (std::size_t i = 0; i < a.trials.size(); ++i) {
        if (!b.trials[i].success) continue;
        ++matched;
        bad += !a.trials[i].success;
    }
    return matched ? static_cast<double>(bad) / matched : 0.0;
}

double monotonicity_rate(const PhaseGridResult& r) {
    std::size_t ok = 0, total = 0;
    for (std::size_t mi = 1; mi < r.counts.size(); ++mi)
        for (std::size_t si = 0; si < r.counts[mi].size(); ++si, ++total) ok += r.counts[mi][si] >= r.counts[mi - 1][si];
    return total ? static_cast<double>(ok) / total : 1.0;
}

std::optional<int> smallest_full_success_m(const PhaseGridResult& r, std::size_t si) {
    std::optional<int> best;
    for (std::size_t mi = 0; mi < r.counts.size(); ++mi)
        if (r.counts[mi].at(si) == r.spec.trials && (!best || r.spec.m_values[mi] < *best)) best = r.spec.m_values[mi];
    return best;
}

std::vector<std::pair<int, int>> bench_preset() {
    return {{15, 80}, {16, 90}, {17, 100}, {18, 110}, {19, 120}, {20, 130}, {21, 140}, {22, 150}, {23, 160}};
}

std::vector<BenchRow> run_bench(const std::vector<std::pair<int, int>>& sizes, int s, const SolverConfig& cfg,
                                std::uint64_t base_seed) {
    std::vector<BenchRow> rows;
    for (const auto& [n, m] : sizes) {
        const std::uint64_t seed =
            derive_seed(base_seed, {static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(s)});
        const TrialOutcome out = run_trial(n, s, m, seed, cfg);
        rows.push_back({n, m, s, out.result.wall_time, *out.result.rel_error, out.result.iters, out.success,
                        out.result.converged});
    }
    return rows;
}

std::string bench_csv(const std::vector<BenchRow>& rows) {
    std::ostringstream os;
    os.precision(10);
    os << "n,m,s,wall_time,rel_error,iters,success,converged\n";
    for (const auto& r : rows)
        os << r.n << ',' << r.m << ',' << r.s << ',' << r.wall_time << ',' << r.rel_error << ',' << r.iters << ','
           << r.success << ',' << r.converged << '\n';
    return os.str();
}

int gray_level(int count, int trials) {
    if (trials < 1 || count < 0 || count > trials) throw std::invalid_argument("gray_level: count out of range");
    return (2 * 255 * count + trials) / (2 * trials);
}

std::string counts_csv(const PhaseGridResult& result) {
    std::ostringstream os;
    os << "m\\s";
    for (int s : result.spec.s_values) os << ',' << s;
    os << '\n';
    for (std::size_t mi = 0; mi < result.counts.size(); ++mi) {
        os << result.spec.m_values[mi];
        for (int c : result.counts[mi]) os << ',' << c;
        os << '\n';
    }
    return os.str();
}

std::string phase_pgm(const PhaseGridResult& result) {
    const std::size_t rows = result.counts.size();
    const std::size_t cols = rows ? result.counts.front().size() : 0;
    if (rows == 0 || cols == 0) throw std::invalid_argument("phase plot: empty result");

    // Ascending axes regardless of the order the grid was specified in.
    std::vector<std::size_t> mo(rows), so(cols);
    for (std::size_t i = 0; i < rows; ++i) mo[i] = i;
    for (std::size_t i = 0; i < cols; ++i) so[i] = i;
    std::stable_sort(mo.begin(), mo.end(),
                     [&](auto a, auto b) { return result.spec.m_values[a] < result.spec.m_values[b]; });
    std::stable_sort(so.begin(), so.end(),
                     [&](auto a, auto b) { return result.spec.s_values[a] < result.spec.s_values[b]; });

    std::string out = "P5\n" + std::to_string(cols) + " " + std::to_string(rows) + "\n255\n";
    for (std::size_t r : mo)
        for (std::size_t c : so) out.push_back(static_cast<char>(gray_level(result.counts[r][c], result.spec.trials)));
    return out;
}

void emit_phase_plot(const PhaseGridResult& result, const std::filesystem::path& stem) {
    const std::string pgm = phase_pgm(result);
    auto open = [](const std::filesystem::path& p, std::ios::openmode mode) {
        std::ofstream f(p, mode);
        if (!f) throw std::runtime_error("cannot open " + p.string());
        return f;
    };
    auto csv_path = stem, pgm_path = stem;
    csv_path += ".csv";
    pgm_path += ".pgm";
    open(csv_path, std::ios::out) << counts_csv(result);
    open(pgm_path, std::ios::out | std::ios::binary) << pgm;
}

nlohmann::json to_json(const PhaseGridResult& result) {
    nlohmann::json trials = nlohmann::json::array();
    for (const auto& t : result.trials)
        trials.push_back({{"m", t.m},
                          {"s", t.s},
                          {"trial", t.trial},
                          {"seed", t.seed},
                          {"success", t.success},
                          {"rel_error", t.rel_error},
                          {"iters", t.iters},
                          {"wall_time", t.wall_time},
                          {"converged", t.converged}});
    return {{"spec", to_json(result.spec)},
            {"counts", result.counts},
            {"mean_rel_error", result.mean_rel_error},
            {"mean_iters", result.mean_iters},
            {"mean_wall_time", result.mean_wall_time},
            {"trials", trials}};
}

std::string content_hash(const nlohmann::json& doc) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : doc.dump()) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace spectra2d
