#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "spectra2d/experiment.hpp"

using namespace spectra2d;

TEST_CASE("run_trial") {
    const SolverConfig cfg;
    const TrialOutcome full = run_trial(8, 2, 64, 5, cfg);
    CHECK(full.success);
    CHECK(*full.result.rel_error <= 1e-6);

    CHECK_THROWS_AS(run_trial(8, 2, 0, 5, cfg), std::invalid_argument);
    CHECK_THROWS_AS(run_trial(8, 2, 65, 5, cfg), std::invalid_argument);

    const TrialOutcome a = run_trial(12, 2, 60, 99, cfg), b = run_trial(12, 2, 60, 99, cfg);
    CHECK(a.success == b.success);
    CHECK(*a.result.rel_error == *b.result.rel_error);
    CHECK(a.result.iters == b.result.iters);
}

TEST_CASE("cell seeds are stable and distinct") {
    CHECK(cell_seed(0, 100, 5, 3) == cell_seed(0, 100, 5, 3));
    CHECK(cell_seed(0, 100, 5, 3) != cell_seed(0, 100, 5, 4));
    CHECK(cell_seed(0, 100, 5, 3) != cell_seed(1, 100, 5, 3));
    CHECK(cell_seed(0, 100, 5, 3) != cell_seed(0, 5, 100, 3));
}

TEST_CASE("run_phase_grid") {
    SolverConfig cfg;
    SUBCASE("full observation always succeeds") {
        PhaseGridSpec spec{.n = 8, .m_values = {64}, .s_values = {1}, .trials = 3};
        const PhaseGridResult r = run_phase_grid(spec, cfg, 1);
        CHECK(r.counts == std::vector<std::vector<int>>{{3}});
    }
    SUBCASE("deterministic and independent of the worker count") {
        PhaseGridSpec spec{.n = 12, .m_values = {30, 80}, .s_values = {1, 2}, .trials = 3, .base_seed = 4};
        const PhaseGridResult a = run_phase_grid(spec, cfg, 1);
        const PhaseGridResult b = run_phase_grid(spec, cfg, 1);
        const PhaseGridResult c = run_phase_grid(spec, cfg, 3);
        CHECK(a.counts == b.counts);
        CHECK(a.counts == c.counts);
        for (std::size_t i = 0; i < a.trials.size(); ++i) {
            CHECK(a.trials[i].seed == c.trials[i].seed);
            CHECK(a.trials[i].rel_error == c.trials[i].rel_error);
        }
        for (const auto& row : a.counts)
            for (int v : row) CHECK((v >= 0 && v <= 3));
        CHECK(monotonicity_rate(a) >= 0.0);
        CHECK(smallest_full_success_m(a, 0).has_value());
    }
    SUBCASE("invalid specs") {
        PhaseGridSpec spec{.n = 8, .m_values = {65}, .s_values = {1}, .trials = 1};
        CHECK_THROWS_AS(run_phase_grid(spec, cfg), std::invalid_argument);
        spec.m_values = {10};
        spec.s_values = {5};
        CHECK_THROWS_AS(run_phase_grid(spec, cfg), std::invalid_argument);
        spec.s_values = {1};
        spec.trials = 0;
        CHECK_THROWS_AS(run_phase_grid(spec, cfg), std::invalid_argument);
    }
}

TEST_CASE("grid comparisons") {
    PhaseGridResult a, b;
    a.spec = b.spec = PhaseGridSpec{.n = 10, .m_values = {10, 20}, .s_values = {1}, .trials = 2};
    a.counts = {{1}, {2}};
    b.counts = {{2}, {2}};
    a.trials = {{10, 1, 0, 0, false}, {10, 1, 1, 0, true}, {20, 1, 0, 0, true}, {20, 1, 1, 0, true}};
    b.trials = {{10, 1, 0, 0, true}, {10, 1, 1, 0, true}, {20, 1, 0, 0, true}, {20, 1, 1, 0, true}};
    CHECK(cell_dominance_rate(a, b) == 0.5);
    CHECK(cell_dominance_rate(b, a) == 1.0);
    CHECK(per_seed_violation_rate(a, b) == 0.25);
    CHECK(monotonicity_rate(a) == 1.0);
    CHECK(smallest_full_success_m(a) == 20);
    CHECK(smallest_full_success_m(b) == 10);

    PhaseGridResult c = b;
    c.spec.trials = 3;
    CHECK_THROWS_AS(cell_dominance_rate(a, c), std::invalid_argument);
}

TEST_CASE("gray levels and phase plot outputs") {
    CHECK(gray_level(20, 20) == 255);
    CHECK(gray_level(0, 20) == 0);
    CHECK(gray_level(10, 20) == 128);
    CHECK(gray_level(1, 2) == 128);
    CHECK_THROWS_AS(gray_level(3, 2), std::invalid_argument);

    PhaseGridResult r;
    r.spec = PhaseGridSpec{.n = 50, .m_values = {200, 100}, .s_values = {2, 1}, .trials = 4};
    r.counts = {{4, 2}, {0, 1}};  // [m=200][s=2], [m=200][s=1], [m=100][s=2], [m=100][s=1]
    CHECK(counts_csv(r) == "m\\s,2,1\n200,4,2\n100,0,1\n");

    const std::string pgm = phase_pgm(r);
    const std::string header = "P5\n2 2\n255\n";
    REQUIRE(pgm.size() == header.size() + 4);
    CHECK(pgm.substr(0, header.size()) == header);
    // Rows ascending m (100, 200), columns ascending s (1, 2).
    const auto px = [&](int i) { return static_cast<unsigned char>(pgm[header.size() + i]); };
    CHECK(px(0) == gray_level(1, 4));
    CHECK(px(1) == 0);
    CHECK(px(2) == 128);
    CHECK(px(3) == 255);

    const auto dir = std::filesystem::temp_directory_path() / "spectra2d_phase_plot_test";
    std::filesystem::create_directories(dir);
    emit_phase_plot(r, dir / "grid");
    CHECK(std::filesystem::file_size(dir / "grid.pgm") == pgm.size());
    std::ifstream in(dir / "grid.csv");
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(ss.str() == counts_csv(r));
    std::filesystem::remove_all(dir);

    PhaseGridResult all_white = r;
    all_white.counts = {{4, 4}, {4, 4}};
    for (std::size_t i = header.size(); i < pgm.size(); ++i)
        CHECK(static_cast<unsigned char>(phase_pgm(all_white)[i]) == 255);
}

TEST_CASE("bench") {
    const auto preset = bench_preset();
    REQUIRE(preset.size() == 9);
    CHECK(preset.front() == std::pair{15, 80});
    CHECK(preset.back() == std::pair{23, 160});

    const auto rows = run_bench({{15, 225}}, 1, SolverConfig{});
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].rel_error <= 1e-6);
    CHECK(rows[0].success);
    CHECK(bench_csv(rows).rfind("n,m,s,wall_time,rel_error,iters,success,converged\n15,225,1,", 0) == 0);
}

TEST_CASE("json and hashing") {
    PhaseGridSpec spec{.n = 20, .m_values = {1, 2}, .s_values = {3}, .trials = 7, .base_seed = 9,
                       .variant = Variant::nuclear};
    CHECK(phase_spec_from_json(to_json(spec)) == spec);
    CHECK_THROWS_AS(phase_spec_from_json({{"bogus", 1}}), std::invalid_argument);

    const nlohmann::json a = {{"x", 1}}, b = {{"x", 2}};
    CHECK(content_hash(a) == content_hash(nlohmann::json{{"x", 1}}));
    CHECK(content_hash(a) != content_hash(b));
    CHECK(content_hash(a).size() == 16);
}
