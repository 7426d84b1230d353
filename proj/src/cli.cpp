#include "spectra2d/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

namespace spectra2d {

namespace {

constexpr int kLargeN = 500;
constexpr int kLargeS = 10;
constexpr int kLargeM = 5000;

PhaseGridSpec default_phase_spec() {
    PhaseGridSpec spec;
    for (int s = 1; s <= 20; ++s) spec.s_values.push_back(s);
    for (int m = 50; m <= 1250; m += 50) spec.m_values.push_back(m);
    return spec;
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open " + path.string());
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(path.string() + ": " + e.what());
    }
}

void write_text(const std::filesystem::path& path, const std::string& text, bool binary = false) {
    std::ofstream out(path, binary ? std::ios::out | std::ios::binary : std::ios::out);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << text;
}

void write_manifest(const RunConfig& cfg, const nlohmann::json& seeds, const nlohmann::json& outputs) {
    nlohmann::json manifest = {{"command", std::string(to_string(cfg.command))},
                               {"config", to_json(cfg)},
                               {"seeds", seeds},
                               {"outputs", outputs}};
    manifest["content_hash"] = content_hash(manifest);
    write_text(cfg.paths.out_dir / "manifest.json", manifest.dump(2) + "\n");
}

void validate(const RunConfig& cfg) {
    cfg.solver.validate();
    switch (cfg.command) {
        case Command::phase:
            if (!cfg.experiment) throw std::invalid_argument("phase: missing experiment grid");
            cfg.experiment->validate();
            return;
        case Command::bench:
            for (const auto& [n, m] : bench_preset())
                if (cfg.s < 1 || 2 * cfg.s > n) throw std::invalid_argument("bench: --s must lie in [1, 7]");
            return;
        default: break;
    }
    if (cfg.paths.observations) return;
    if (cfg.n < 1) throw std::invalid_argument("--n must be >= 1");
    if (cfg.s < 1 || (cfg.s > 1 && 2 * cfg.s > cfg.n)) throw std::invalid_argument("--s must lie in [1, n/2]");
    if (cfg.m < 1 || static_cast<std::int64_t>(cfg.m) > static_cast<std::int64_t>(cfg.n) * cfg.n)
        throw std::invalid_argument("--m must lie in [1, n^2]");
}

nlohmann::json result_json(const RecoveryResult& r, const RunConfig& cfg, int n, int m) {
    nlohmann::json j = {{"n", n},
                        {"m", m},
                        {"variant", std::string(to_string(cfg.solver.variant))},
                        {"iters", r.iters},
                        {"wall_time", r.wall_time},
                        {"converged", r.converged},
                        {"final_r", r.final_r},
                        {"final_s", r.final_s},
                        {"objective", r.objective},
                        {"restarts", r.restarts}};
    j["rel_error"] = r.rel_error ? nlohmann::json(*r.rel_error) : nlohmann::json(nullptr);
    if (r.rel_error) j["success"] = *r.rel_error <= kSuccessThreshold;
    if (cfg.solver.variant == Variant::toeplitz)
        j["toeplitz_rank"] = {toeplitz_rank_estimate(r.T1, 1e-4), toeplitz_rank_estimate(r.T2, 1e-4)};
    return j;
}

int run_solve(const RunConfig& cfg) {
    std::optional<SpectralSignal> truth;
    ObservationSet obs;
    nlohmann::json seeds = {{"seed", cfg.seed}};
    if (cfg.paths.signal) truth = signal_from_json(read_json_file(*cfg.paths.signal));
    if (cfg.paths.observations) {
        obs = observations_from_json(read_json_file(*cfg.paths.observations));
    } else {
        if (!truth) {
            truth = synth_random(cfg.n, cfg.s, signal_seed(cfg.seed));
            seeds["signal_seed"] = signal_seed(cfg.seed);
        }
        obs = sample_observations(*truth, cfg.m, observation_seed(cfg.seed));
        seeds["observation_seed"] = observation_seed(cfg.seed);
    }

    const RecoveryResult r = solve(obs, cfg.solver, truth);
    const nlohmann::json out = result_json(r, cfg, obs.n, obs.size());
    write_text(cfg.paths.out_dir / "result.json", out.dump(2) + "\n");
    write_trace_csv(r.history, cfg.paths.out_dir / "trace.csv");
    write_csv(r.X_rec, cfg.paths.out_dir / "recovered.csv");
    write_manifest(cfg, seeds, {"result.json", "trace.csv", "recovered.csv"});

    std::cout << "n=" << obs.n << " m=" << obs.size() << " iters=" << r.iters << " converged=" << r.converged
              << " wall_time=" << r.wall_time << "s";
    if (r.rel_error) std::cout << " rel_error=" << *r.rel_error;
    std::cout << '\n';
    return r.converged ? 0 : 1;
}

int run_synth(const RunConfig& cfg) {
    const SpectralSignal sig = synth_random(cfg.n, cfg.s, signal_seed(cfg.seed));
    const CMatrix dense = sig.dense();
    const ObservationSet obs = sample_observations(dense, cfg.m, observation_seed(cfg.seed));
    write_text(cfg.paths.out_dir / "signal.json", to_json(sig).dump(2) + "\n");
    write_text(cfg.paths.out_dir / "observations.json", to_json(obs).dump() + "\n");
    write_csv(dense, cfg.paths.out_dir / "signal_dense.csv");
    write_manifest(cfg, {{"seed", cfg.seed}, {"signal_seed", signal_seed(cfg.seed)}, {"observation_seed", observation_seed(cfg.seed)}},
                   {"signal.json", "observations.json", "signal_dense.csv"});
    std::cout << "synthesized n=" << cfg.n << " s=" << cfg.s << " m=" << cfg.m << " min_separation=" << sig.min_separation()
              << '\n';
    return 0;
}

int run_phase(const RunConfig& cfg) {
    const PhaseGridResult res = run_phase_grid(*cfg.experiment, cfg.solver, cfg.jobs);
    emit_phase_plot(res, cfg.paths.out_dir / "phase");
    write_text(cfg.paths.out_dir / "phase.json", to_json(res).dump(1) + "\n");
    write_manifest(cfg, {{"base_seed", cfg.experiment->base_seed}}, {"phase.csv", "phase.pgm", "phase.json"});
    std::cout << counts_csv(res);
    return 0;
}

int run_bench_cmd(const RunConfig& cfg) {
    const auto rows = run_bench(bench_preset(), cfg.s, cfg.solver, cfg.seed);
    write_text(cfg.paths.out_dir / "bench.csv", bench_csv(rows));
    write_manifest(cfg, {{"base_seed", cfg.seed}}, {"bench.csv"});
    std::cout << bench_csv(rows);
    return std::all_of(rows.begin(), rows.end(), [](const BenchRow& r) { return r.converged; }) ? 0 : 1;
}

}  // namespace

std::string_view to_string(Command c) noexcept {
    switch (c) {
        case Command::synth: return "synth";
        case Command::solve: return "solve";
        case Command::phase: return "phase";
        case Command::bench: return "bench";
        case Command::demo_large: return "demo-large";
    }
    return "solve";
}

Command command_from_string(std::string_view s) {
    for (Command c : {Command::synth, Command::solve, Command::phase, Command::bench, Command::demo_large})
        if (to_string(c) == s) return c;
    throw std::invalid_argument("unknown command '" + std::string(s) + "'");
}

nlohmann::json to_json(const RunConfig& cfg) {
    nlohmann::json paths = {{"out_dir", cfg.paths.out_dir.string()}};
    if (cfg.paths.signal) paths["signal"] = cfg.paths.signal->string();
    if (cfg.paths.observations) paths["observations"] = cfg.paths.observations->string();
    nlohmann::json j = {{"command", std::string(to_string(cfg.command))},
                        {"solver", to_json(cfg.solver)},
                        {"paths", paths},
                        {"seed", cfg.seed},
                        {"n", cfg.n},
                        {"s", cfg.s},
                        {"m", cfg.m},
                        {"jobs", cfg.jobs}};
    if (cfg.experiment) j["experiment"] = to_json(*cfg.experiment);
    return j;
}

RunConfig run_config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw std::invalid_argument("run config: expected a JSON object");
    RunConfig cfg;
    for (const auto& [key, value] : j.items()) {
        if (key == "command") cfg.command = command_from_string(value.get<std::string>());
        else if (key == "solver") cfg.solver = solver_config_from_json(value);
        else if (key == "experiment") cfg.experiment = phase_spec_from_json(value);
        else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
        else if (key == "n") cfg.n = value.get<int>();
        else if (key == "s") cfg.s = value.get<int>();
        else if (key == "m") cfg.m = value.get<int>();
        else if (key == "jobs") cfg.jobs = value.get<unsigned>();
        else if (key == "paths") {
            for (const auto& [pk, pv] : value.items()) {
                if (pk == "out_dir") cfg.paths.out_dir = pv.get<std::string>();
                else if (pk == "signal") cfg.paths.signal = pv.get<std::string>();
                else if (pk == "observations") cfg.paths.observations = pv.get<std::string>();
                else throw std::invalid_argument("run config: unknown paths key '" + pk + "'");
            }
        } else {
            throw std::invalid_argument("run config: unknown key '" + key + "'");
        }
    }
    return cfg;
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    auto to_int = [&](const std::string& tok) {
        std::size_t used = 0;
        int v = 0;
        try {
            v = std::stoi(tok, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (tok.empty() || used != tok.size()) throw std::invalid_argument("bad integer '" + tok + "' in list '" + text + "'");
        return v;
    };
    if (text.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::stringstream ss(text);
        for (std::string tok; std::getline(ss, tok, ':');) parts.push_back(tok);
        if (parts.size() != 3) throw std::invalid_argument("range must be start:stop:step, got '" + text + "'");
        const int a = to_int(parts[0]), b = to_int(parts[1]), step = to_int(parts[2]);
        if (step <= 0 || b < a) throw std::invalid_argument("range needs step > 0 and stop >= start: '" + text + "'");
        for (int v = a; v <= b; v += step) out.push_back(v);
    } else {
        std::stringstream ss(text);
        for (std::string tok; std::getline(ss, tok, ',');) out.push_back(to_int(tok));
    }
    if (out.empty()) throw std::invalid_argument("empty integer list");
    return out;
}

RunConfig parse_cli(const std::vector<std::string>& argv) {
    CLI::App app{"Recover 2D spectrally sparse signals from partial samples (Toeplitz SDP via ADMM)", "spectra2d"};
    app.set_help_flag("-h,--help", "Show help");

    std::string command;
    int n = 0, s = 0, m = 0, max_iters = 0, trials = 0;
    std::uint64_t seed = 0;
    unsigned jobs = 0;
    double rho = 0, eps_abs = 0, eps_rel = 0;
    bool accelerate = false;
    std::string variant, m_grid, s_grid, config_path, out_dir, signal_path, obs_path;

    app.add_option("command", command, "synth | solve | phase | bench | demo-large")
        ->required()
        ->check(CLI::IsMember({"synth", "solve", "phase", "bench", "demo-large"}));
    auto env = [](const char* name) { return std::string(kEnvPrefix) + name; };
    auto add = [](CLI::Option* opt) { return opt; };
    auto* o_n = add(app.add_option("--n", n, "signal side length (default 50)")->envname(env("N")));
    auto* o_s = add(app.add_option("--s", s, "number of sinusoids (default 5)")->envname(env("S")));
    auto* o_m = add(app.add_option("--m", m, "number of observed entries (default 500)")->envname(env("M")));
    auto* o_seed = add(app.add_option("--seed", seed, "base random seed")->envname(env("SEED")));
    auto* o_rho = add(app.add_option("--rho", rho, "ADMM penalty (default 0.1)")->envname(env("RHO")));
    auto* o_eabs = add(app.add_option("--eps-abs", eps_abs, "absolute tolerance (default 1e-5)")->envname(env("EPS_ABS")));
    auto* o_erel = add(app.add_option("--eps-rel", eps_rel, "relative tolerance (default 1e-5)")->envname(env("EPS_REL")));
    auto* o_iters = add(app.add_option("--max-iters", max_iters, "iteration cap (default 20000)")->envname(env("MAX_ITERS")));
    auto* o_var = add(app.add_option("--variant", variant, "toeplitz | nuclear")
                          ->check(CLI::IsMember({"toeplitz", "nuclear"}))
                          ->envname(env("VARIANT")));
    auto* o_acc = add(app.add_flag("--accelerate,!--no-accelerate", accelerate, "fast ADMM with restart")
                          ->envname(env("ACCELERATE")));
    auto* o_trials = add(app.add_option("--trials", trials, "trials per phase-grid cell (default 20)")->envname(env("TRIALS")));
    auto* o_mgrid = add(app.add_option("--m-grid", m_grid, "m values: a,b,c or start:stop:step")->envname(env("M_GRID")));
    auto* o_sgrid = add(app.add_option("--s-grid", s_grid, "s values: a,b,c or start:stop:step")->envname(env("S_GRID")));
    auto* o_jobs = add(app.add_option("--jobs", jobs, "worker threads for phase grids (0 = all cores)")->envname(env("JOBS")));
    auto* o_config = add(app.add_option("--config", config_path, "JSON run config; flags override it")->envname(env("CONFIG")));
    auto* o_out = add(app.add_option("--out", out_dir, "output directory (default .)")->envname(env("OUT")));
    auto* o_sig = add(app.add_option("--signal", signal_path, "ground-truth signal JSON (solve)")->envname(env("SIGNAL")));
    auto* o_obs = add(app.add_option("--observations", obs_path, "observation JSON (solve)")->envname(env("OBSERVATIONS")));

    if (argv.empty()) throw CliError(app.help(), 2);
    try {
        std::vector<std::string> rev(argv.rbegin(), argv.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        throw CliError(app.help(), 0);
    } catch (const CLI::ParseError& e) {
        throw CliError(std::string("error: ") + e.what() + "\n\n" + app.help(), 2);
    }
    auto given = [](const CLI::Option* o) { return o->count() > 0; };

    try {
        const Command cmd = command_from_string(command);
        RunConfig cfg;
        if (given(o_config)) cfg = run_config_from_json(read_json_file(config_path));
        else if (cmd == Command::demo_large) {
            cfg.n = kLargeN;
            cfg.s = kLargeS;
            cfg.m = kLargeM;
            cfg.solver.accelerate = true;
        }
        cfg.command = cmd;
        if (cmd == Command::phase && !cfg.experiment) cfg.experiment = default_phase_spec();

        if (given(o_n)) cfg.n = n;
        if (given(o_s)) cfg.s = s;
        if (given(o_m)) cfg.m = m;
        if (given(o_seed)) cfg.seed = seed;
        if (given(o_rho)) cfg.solver.rho = rho;
        if (given(o_eabs)) cfg.solver.eps_abs = eps_abs;
        if (given(o_erel)) cfg.solver.eps_rel = eps_rel;
        if (given(o_iters)) cfg.solver.max_iters = max_iters;
        if (given(o_var)) cfg.solver.variant = variant_from_string(variant);
        if (given(o_acc)) cfg.solver.accelerate = accelerate;
        if (given(o_jobs)) cfg.jobs = jobs;
        if (given(o_out)) cfg.paths.out_dir = out_dir;
        if (given(o_sig)) cfg.paths.signal = signal_path;
        if (given(o_obs)) cfg.paths.observations = obs_path;

        if (cfg.experiment) {
            PhaseGridSpec& spec = *cfg.experiment;
            if (given(o_n)) spec.n = n;
            if (given(o_trials)) spec.trials = trials;
            if (given(o_mgrid)) spec.m_values = parse_int_list(m_grid);
            if (given(o_sgrid)) spec.s_values = parse_int_list(s_grid);
            if (given(o_seed)) spec.base_seed = seed;
            if (given(o_var)) spec.variant = cfg.solver.variant;
            else cfg.solver.variant = spec.variant;
        } else if (given(o_trials) || given(o_mgrid) || given(o_sgrid)) {
            throw std::invalid_argument("--trials/--m-grid/--s-grid only apply to the phase command");
        }
        validate(cfg);
        return cfg;
    } catch (const std::invalid_argument& e) {
        throw CliError(std::string("error: ") + e.what(), 2);
    } catch (const nlohmann::json::exception& e) {
        throw CliError(std::string("error: config: ") + e.what(), 2);
    }
}

int run(const RunConfig& cfg) {
    try {
        validate(cfg);
        std::filesystem::create_directories(cfg.paths.out_dir);
        switch (cfg.command) {
            case Command::synth: return run_synth(cfg);
            case Command::solve:
            case Command::demo_large: return run_solve(cfg);
            case Command::phase: return run_phase(cfg);
            case Command::bench: return run_bench_cmd(cfg);
        }
    } catch (const DivergenceError& e) {
        std::cerr << "solver failure: " << e.what() << '\n';
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}

}  // namespace spectra2d
