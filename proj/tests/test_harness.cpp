// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "mwsr/harness.hpp"

using namespace mwsr;

namespace {

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::filesystem::path scratch(const std::string& name)
{
    const auto dir = std::filesystem::temp_directory_path() / "mwsr_harness_tests";
    std::filesystem::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST_CASE("presets", "[harness]")
{
    ExperimentConfig cfg;
    apply_preset("small10", cfg);
    CHECK(cfg.users == 10);
    CHECK(cfg.nt == 4);
    CHECK(cfg.nr == 4);
    CHECK(*cfg.weights == reference_weights_10());

    apply_preset("large100", cfg);
    CHECK(cfg.users == 100);
    CHECK(cfg.weights->size() == 100);
    CHECK(std::all_of(cfg.weights->begin(), cfg.weights->end(), [](double w) { return w == 1.0; }));

    CHECK_THROWS_AS(apply_preset("huge", cfg), std::invalid_argument);
}

TEST_CASE("experiment configuration validation", "[harness]")
{
    ExperimentConfig cfg;
    cfg.repetitions = 0;
    CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);
    cfg = {};
    cfg.users = 3;
    cfg.weights = std::vector<double>{1.0, 2.0};
    CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);
    cfg = {};
    cfg.power = -1.0;
    CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);
    cfg = {};
    cfg.instance_path = "/nonexistent/instance.json";
    CHECK_THROWS_AS(run_experiment(cfg), InstanceFormatError);
}

TEST_CASE("reference ten-user scenario", "[harness]")
{
    ExperimentConfig cfg;
    apply_preset("small10", cfg);
    cfg.seed = 11;
    const auto path = scratch("small10.csv");
    cfg.output = path.string();
    std::ostringstream log;
    const auto out = run_experiment(cfg, &log);
    REQUIRE(out.runs.size() == 1);
    CHECK(out.all_converged());
    CHECK(out.rows.size() <= cfg.optimizer.max_iters);
    CHECK(out.rows.size() == out.runs[0].iterations);
    for (std::size_t i = 1; i < out.rows.size(); ++i)
        CHECK(out.rows[i].record.objective >= out.rows[i - 1].record.objective);
    CHECK(log.str().find("converged") != std::string::npos);

    const auto first = slurp(path);
    run_experiment(cfg);
    CHECK(slurp(path) == first);

    cfg.output.clear();
    cfg.algorithm = Algorithm::gp;
    const auto gp = run_experiment(cfg);
    const double a = out.runs[0].final_objective;
    const double b = gp.runs[0].final_objective;
    CHECK(std::abs(a - b) / std::abs(a) <= 1e-4);

    cfg.unit = RateUnit::bits;
    cfg.algorithm = Algorithm::cgp;
    const auto bits = run_experiment(cfg);
    CHECK(bits.runs[0].final_objective == Catch::Approx(a / std::log(2.0)).epsilon(1e-14));
}

TEST_CASE("repetitions advance the seed", "[harness]")
{
    ExperimentConfig cfg;
    cfg.users = 3;
    cfg.nt = 2;
    cfg.nr = 2;
    cfg.seed = 40;
    cfg.repetitions = 3;
    const auto out = run_experiment(cfg);
    REQUIRE(out.runs.size() == 3);
    for (std::size_t r = 0; r < 3; ++r) {
        CHECK(out.runs[r].run == r);
        CHECK(out.runs[r].seed == 40 + r);
    }
    CHECK(out.rows.front().seed == 40);
    CHECK(out.rows.back().seed == 42);

    cfg.seed = 41;
    cfg.repetitions = 1;
    const auto single = run_experiment(cfg);
    CHECK(single.runs[0].final_objective == out.runs[1].final_objective);
}

TEST_CASE("instance files drive experiments", "[harness]")
{
    const auto path = scratch("inst.json");
    const auto inst = make_instance(generate_rayleigh_channels(3, 3, 2, 9), {0.5, 1.0, 1.5}, 4.0);
    save_instance(path.string(), inst);

    ExperimentConfig cfg;
    cfg.instance_path = path.string();
    const auto out = run_experiment(cfg);
    const auto direct = cgp_solve(inst, OptimizerConfig{});
    CHECK(out.runs[0].final_objective == direct.final_objective);

    cfg.weights = std::vector<double>{1.0, 1.0, 1.0};
    cfg.power = 2.0;
    const auto overridden = experiment_instance(cfg, 0);
    CHECK(overridden.power == 2.0);
    CHECK(overridden.weights.weights == std::vector<double>{1.0, 1.0, 1.0});
    CHECK(overridden.channels.channels[1] == inst.channels.channels[1]);
}

TEST_CASE("grid maximizer of the dual function", "[harness]")
{
    const RealVector lam{{2.0, -1.0}};
    const auto g = grid_maximize_psi(lam, 1.0, 5.0, 2'000'001);
    CHECK(std::abs(g.mu - 1.0) <= 1e-6);
    CHECK(g.psi == Catch::Approx(dual_psi(1.0, lam, 1.0, 5.0)).epsilon(1e-12));
}

TEST_CASE("scaling benchmark", "[harness]")
{
    const auto one = scaling_benchmark({4}, 2, 2, 3, 1, 1);
    REQUIRE(one.rows.size() == 1);
    CHECK(one.rows[0].users == 4);
    CHECK(one.rows[0].ms_per_iter > 0.0);
    CHECK_THROWS_AS(scaling_benchmark({8, 4}, 2, 2, 3, 1, 1), std::invalid_argument);

    const std::vector<ScalingRow> linear{{10, 1.0}, {20, 2.0}, {40, 4.0}};
    CHECK(loglog_slope(linear) == Catch::Approx(1.0).epsilon(1e-12));
    const std::vector<ScalingRow> flat{{10, 3.0}, {100, 3.0}};
    CHECK(loglog_slope(flat) == Catch::Approx(0.0).margin(1e-12));
}
