// SPDX-License-Identifier: Apache-2.0
//
// mwsr: weighted sum-rate solver for MIMO broadcast channels.
//
//   mwsr solve --preset small10 --seed 1 --reps 5 --out trace.csv
//   mwsr verify-theorem1 --users 3 --nt 2 --nr 2 --samples 100
//   mwsr verify-projection --users 3 --nr 3 --samples 500
//   mwsr bench-scaling --k-list 10,20,40,80,160 --iters 30
//   mwsr gen-instance --users 4 --nt 4 --nr 2 --seed 7 --out inst.json

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mwsr/mwsr.hpp"

namespace {

std::vector<double> parse_weight_list(const std::string& text)
{
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        const double v = std::stod(item, &used);
        if (used != item.size()) throw std::invalid_argument("bad weight '" + item + "'");
        out.push_back(v);
    }
    if (out.empty()) throw std::invalid_argument("empty weight list");
    return out;
}

std::vector<std::size_t> parse_size_list(const std::string& text)
{
    std::vector<std::size_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(static_cast<std::size_t>(std::stoul(item)));
    return out;
}

struct Options {
    std::size_t users = 10;
    Eigen::Index nt = 4;
    Eigen::Index nr = 4;
    double power = 10.0;
    std::string weights;
    std::uint64_t seed = 1;
    std::string algorithm = "cgp";
    double beta = 0.5;
    double sigma = 0.1;
    double tol = 1e-6;
    std::size_t max_iters = 1000;
    std::size_t reps = 1;
    std::string instance;
    std::string out;
    std::string unit = "nats";
    std::string preset;
    std::string deflection = "projected";
    bool record_time = false;

    std::size_t samples = 0;
    std::size_t competitors = 1000;
    std::size_t grid_points = 10'000'000;
    std::string k_list = "10,20,40,80,160";
    std::size_t iters = 30;
    std::size_t repeats = 3;
};

mwsr::ExperimentConfig experiment_config(const Options& o, const CLI::App& app)
{
    mwsr::ExperimentConfig cfg;
    if (!o.preset.empty()) mwsr::apply_preset(o.preset, cfg);
    if (!o.instance.empty()) cfg.instance_path = o.instance;
    if (app.count("--users")) cfg.users = o.users;
    if (app.count("--nt")) cfg.nt = o.nt;
    if (app.count("--nr")) cfg.nr = o.nr;
    if (app.count("--power")) cfg.power = o.power;
    if (!o.weights.empty()) {
        if (o.weights == "equal")
            cfg.weights = std::vector<double>(cfg.instance_path ? mwsr::load_instance(o.instance).users() : cfg.users, 1.0);
        else
            cfg.weights = parse_weight_list(o.weights);
    }
    cfg.seed = o.seed;
    cfg.algorithm = o.algorithm == "gp" ? mwsr::Algorithm::gp : mwsr::Algorithm::cgp;
    cfg.optimizer.beta = o.beta;
    cfg.optimizer.sigma = o.sigma;
    cfg.optimizer.epsilon = o.tol;
    cfg.optimizer.max_iters = o.max_iters;
    cfg.optimizer.rule = o.deflection == "per-block" ? mwsr::DeflectionRule::per_block : mwsr::DeflectionRule::projected;
    cfg.optimizer.record_time = o.record_time;
    cfg.output = o.out;
    cfg.repetitions = o.reps;
    cfg.unit = o.unit == "bits" ? mwsr::RateUnit::bits : mwsr::RateUnit::nats;
    return cfg;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Maximum weighted sum rate of MIMO broadcast channels via the dual MAC"};
    app.require_subcommand(1);
    app.fallthrough();

    Options o;
    auto* users = app.add_option("--users", o.users, "number of users K")->check(CLI::PositiveNumber);
    auto* nt = app.add_option("--nt", o.nt, "transmit antennas")->check(CLI::PositiveNumber);
    auto* nr = app.add_option("--nr", o.nr, "receive antennas per user")->check(CLI::PositiveNumber);
    app.add_option("--power", o.power, "total transmit power P")->check(CLI::PositiveNumber);
    app.add_option("--weights", o.weights, "comma-separated user weights or 'equal'");
    app.add_option("--seed", o.seed, "channel seed (advances by one per repetition)");
    app.add_option("--algorithm", o.algorithm, "solver")->check(CLI::IsMember({"cgp", "gp"}));
    app.add_option("--beta", o.beta, "Armijo contraction factor");
    app.add_option("--sigma", o.sigma, "Armijo slope fraction");
    app.add_option("--tol", o.tol, "termination threshold on the max elementwise change");
    app.add_option("--max-iters", o.max_iters, "iteration limit");
    app.add_option("--reps", o.reps, "repetitions")->check(CLI::PositiveNumber);
    auto* instance = app.add_option("--instance", o.instance, "instance JSON file")->check(CLI::ExistingFile);
    app.add_option("--out", o.out, "output file (trace CSV, benchmark CSV or instance JSON)");
    app.add_option("--unit", o.unit, "rate unit")->check(CLI::IsMember({"nats", "bits"}));
    auto* preset = app.add_option("--preset", o.preset, "named scenario")->check(CLI::IsMember({"small10", "large100"}));
    app.add_option("--deflection", o.deflection, "conjugate deflection rule")
        ->check(CLI::IsMember({"projected", "per-block"}));
    app.add_flag("--record-time", o.record_time, "fill the elapsed_ms trace column with wall-clock time");
    instance->excludes(users)->excludes(nt)->excludes(nr)->excludes(preset);

    auto* solve = app.add_subcommand("solve", "run the solver and write a convergence trace");
    auto* theorem = app.add_subcommand("verify-theorem1", "compare the objective with decoding-order enumeration");
    theorem->add_option("--samples", o.samples, "random covariance samples (default 100)");
    auto* projection = app.add_subcommand("verify-projection", "check the sum-power projection against oracles");
    projection->add_option("--samples", o.samples, "random inputs (default 500)");
    projection->add_option("--competitors", o.competitors, "sampled feasible competitors per input");
    projection->add_option("--grid-points", o.grid_points, "grid points of the dual maximization oracle");
    auto* bench = app.add_subcommand("bench-scaling", "per-iteration time against the number of users");
    bench->add_option("--k-list", o.k_list, "ascending comma-separated user counts");
    bench->add_option("--iters", o.iters, "iterations per timed solve");
    bench->add_option("--repeats", o.repeats, "timed solves per K (best is kept)");
    auto* gen = app.add_subcommand("gen-instance", "write a random Rayleigh instance as JSON");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*solve) {
            const auto cfg = experiment_config(o, app);
            const auto outcome = mwsr::run_experiment(cfg, &std::cout);
            return outcome.all_converged() ? 0 : 1;
        }
        if (*theorem) {
            const auto k = app.count("--users") ? o.users : 3;
            const auto t = app.count("--nt") ? o.nt : 2;
            const auto r = app.count("--nr") ? o.nr : 2;
            const auto mode = o.weights == "equal" ? mwsr::WeightMode::equal : mwsr::WeightMode::random;
            const auto rep = mwsr::verify_theorem1(k, t, r, o.seed, o.samples ? o.samples : 100, mode, o.power);
            std::cout << "samples " << rep.samples << ", max |objective - enumeration| = "
                      << mwsr::format_real(rep.max_discrepancy) << (rep.passed ? " (pass)" : " (FAIL)") << '\n';
            return rep.passed ? 0 : 1;
        }
        if (*projection) {
            mwsr::ProjectionCheckOptions opt;
            opt.users = app.count("--users") ? o.users : 3;
            opt.nr = app.count("--nr") ? o.nr : 3;
            opt.seed = o.seed;
            opt.samples = o.samples ? o.samples : 500;
            opt.competitors = o.competitors;
            opt.grid_points = o.grid_points;
            const auto rep = mwsr::verify_projection(opt);
            std::cout << "samples " << rep.samples << '\n'
                      << "  worst competitor margin  " << mwsr::format_real(rep.worst_competitor_margin) << '\n'
                      << "  worst dual gap vs grid   " << mwsr::format_real(rep.worst_psi_gap) << '\n'
                      << "  worst idempotence        " << mwsr::format_real(rep.worst_idempotence) << '\n'
                      << "  worst complementarity    " << mwsr::format_real(rep.worst_complementarity) << '\n'
                      << "  worst infeasibility      " << mwsr::format_real(rep.worst_infeasibility) << '\n'
                      << "  max sweep index          " << rep.max_active_index << '\n'
                      << (rep.passed ? "pass" : "FAIL") << '\n';
            return rep.passed ? 0 : 1;
        }
        if (*bench) {
            const auto rep = mwsr::scaling_benchmark(parse_size_list(o.k_list), o.nt, o.nr, o.iters, o.seed, o.repeats);
            std::ostringstream csv;
            csv << "K,ms_per_iter\n";
            for (const auto& row : rep.rows) csv << row.users << ',' << mwsr::format_real(row.ms_per_iter) << '\n';
            if (o.out.empty()) {
                std::cout << csv.str();
            } else {
                std::ofstream f(o.out, std::ios::binary);
                f << csv.str();
            }
            std::cout << "log-log slope " << mwsr::format_real(rep.slope) << '\n';
            return 0;
        }
        if (*gen) {
            auto cfg = experiment_config(o, app);
            if (cfg.instance_path) throw std::invalid_argument("gen-instance does not take --instance");
            const auto inst = mwsr::experiment_instance(cfg, cfg.seed);
            if (o.out.empty())
                mwsr::write_instance(std::cout, inst);
            else
                mwsr::save_instance(o.out, inst);
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "mwsr: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
