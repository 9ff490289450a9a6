// SPDX-License-Identifier: Apache-2.0
//
// Experiment driver behind the command-line tool: repeated solves with trace
// output, the decoding-order and projection verification runs, and the
// per-iteration scaling benchmark.
#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mwsr/cgp.hpp"
#include "mwsr/channel.hpp"
#include "mwsr/instance_io.hpp"
#include "mwsr/projection.hpp"
#include "mwsr/trace_csv.hpp"

namespace mwsr {

// ---------------------------------------------------------------------------
// random inputs

/// Hermitian matrix with i.i.d. complex Gaussian entries, scaled by `scale`.
inline HermitianMatrix random_hermitian(Eigen::Index dim, ComplexGaussianSource& src, double scale = 1.0)
{
    ComplexMatrix a(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i)
        for (Eigen::Index j = 0; j < dim; ++j) a(i, j) = scale * src.next();
    return symmetrize(a);
}

/// PSD blocks A A^H with a random total trace in (0, power].
inline CovarianceSet random_feasible_covariances(std::size_t users, Eigen::Index nr, double power,
                                                 ComplexGaussianSource& src)
{
    CovarianceSet q;
    q.blocks.reserve(users);
    for (std::size_t u = 0; u < users; ++u) {
        ComplexMatrix a(nr, nr);
        for (Eigen::Index i = 0; i < nr; ++i)
            for (Eigen::Index j = 0; j < nr; ++j) a(i, j) = src.next();
        q.blocks.push_back(symmetrize(a * a.adjoint()));
    }
    const double target = power * (1.0 - src.uniform());
    const double scale = target / q.total_trace();
    for (auto& b : q.blocks) b = scale * b;
    return q;
}

// ---------------------------------------------------------------------------
// experiments

enum class Algorithm { cgp, gp };
enum class RateUnit { nats, bits };

inline const std::vector<double>& reference_weights_10()
{
    static const std::vector<double> w{1.0, 1.5, 0.8, 0.9, 1.4, 1.2, 0.7, 1.1, 1.03, 1.3};
    return w;
}

struct ExperimentConfig {
    std::optional<std::string> instance_path;  // exclusive with the generator fields below
    std::size_t users = 10;
    Eigen::Index nt = 4;
    Eigen::Index nr = 4;
    std::uint64_t seed = 1;
    std::optional<double> power;                // default: instance file value, else 10
    std::optional<std::vector<double>> weights;  // nullopt: instance file value, else equal
    Algorithm algorithm = Algorithm::cgp;
    OptimizerConfig optimizer;
    std::string output;  // trace CSV path; empty for none
    std::size_t repetitions = 1;
    RateUnit unit = RateUnit::nats;

    void validate() const
    {
        if (repetitions == 0) throw std::invalid_argument("repetitions must be at least 1");
        if (!instance_path && (users == 0 || nt <= 0 || nr <= 0))
            throw std::invalid_argument("generator dimensions must be positive");
        if (power && !(*power > 0.0)) throw std::invalid_argument("power must be positive");
        optimizer.validate();
    }
};

/// Named scenarios. `small10`: the 10-user weighted system; `large100`: 100
/// equal-weight users. Both use nt = nr = 4.
inline void apply_preset(const std::string& name, ExperimentConfig& cfg)
{
    if (name == "small10") {
        cfg.users = 10;
        cfg.weights = reference_weights_10();
    } else if (name == "large100") {
        cfg.users = 100;
        cfg.weights = std::vector<double>(100, 1.0);
    } else {
        throw std::invalid_argument("unknown preset '" + name + "'");
    }
    cfg.nt = 4;
    cfg.nr = 4;
}

/// Instance for one repetition.
inline ProblemInstance experiment_instance(const ExperimentConfig& cfg, std::uint64_t seed)
{
    if (cfg.instance_path) {
        auto inst = load_instance(*cfg.instance_path);
        const double power = cfg.power.value_or(inst.power);
        const auto weights = cfg.weights.value_or(inst.weights.weights);
        return make_instance(std::move(inst.channels), weights, power, inst.label);
    }
    const auto weights = cfg.weights.value_or(std::vector<double>(cfg.users, 1.0));
    if (weights.size() != cfg.users) throw std::invalid_argument("weight count differs from the number of users");
    return make_instance(generate_rayleigh_channels(cfg.users, cfg.nt, cfg.nr, seed), weights,
                         cfg.power.value_or(10.0), "rayleigh-seed-" + std::to_string(seed));
}

struct RunSummary {
    std::size_t run = 0;
    std::uint64_t seed = 0;
    SolveStatus status = SolveStatus::max_iters;
    std::size_t iterations = 0;
    double final_objective = 0.0;  // in the configured unit
};

struct ExperimentOutcome {
    std::vector<RunSummary> runs;
    std::vector<TraceRow> rows;

    bool all_converged() const
    {
        return std::all_of(runs.begin(), runs.end(), [](const RunSummary& r) { return r.status == SolveStatus::converged; });
    }
};

inline ExperimentOutcome run_experiment(const ExperimentConfig& cfg, std::ostream* log = nullptr)
{
    cfg.validate();
    const auto convert = [&](double nats) { return cfg.unit == RateUnit::bits ? nats_to_bits(nats) : nats; };

    ExperimentOutcome out;
    for (std::size_t run = 0; run < cfg.repetitions; ++run) {
        const std::uint64_t seed = cfg.seed + run;
        const auto inst = experiment_instance(cfg, seed);
        const auto result =
            cfg.algorithm == Algorithm::cgp ? cgp_solve(inst, cfg.optimizer) : gp_solve(inst, cfg.optimizer);
        for (auto rec : result.trace) {
            rec.objective = convert(rec.objective);
            out.rows.push_back({run, seed, rec});
        }
        out.runs.push_back({run, seed, result.status, result.iterations(), convert(result.final_objective)});
        if (log) {
            *log << "run " << run << " seed " << seed << " P " << format_real(inst.power) << ": "
                 << to_string(result.status) << " after "
                 << result.iterations() << " iterations, objective " << format_real(out.runs.back().final_objective)
                 << (cfg.unit == RateUnit::bits ? " bits" : " nats") << '\n';
        }
    }

    if (!cfg.output.empty()) {
        std::ofstream f(cfg.output, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write trace file '" + cfg.output + "'");
        write_trace_csv(f, out.rows);
    }
    return out;
}

// ---------------------------------------------------------------------------
// decoding-order verification

enum class WeightMode { random, equal };

struct Theorem1Report {
    std::size_t samples = 0;
    double max_discrepancy = 0.0;
    bool passed = false;
};

/// Compares the ascending-weight objective with exhaustive decoding-order
/// enumeration on `samples` random feasible covariance sets.
inline Theorem1Report verify_theorem1(std::size_t users, Eigen::Index nt, Eigen::Index nr, std::uint64_t seed,
                                      std::size_t samples, WeightMode mode = WeightMode::random, double power = 10.0)
{
    if (users > 8) throw std::invalid_argument("verify_theorem1: K too large for enumeration (max 8)");
    ComplexGaussianSource src(seed ^ 0x9e3779b97f4a7c15ULL);
    Theorem1Report rep;
    for (std::size_t s = 0; s < samples; ++s) {
        std::vector<double> w(users, 1.0);
        if (mode == WeightMode::random)
            for (auto& x : w) x = 2.0 * src.uniform();
        const auto inst = make_instance(generate_rayleigh_channels(users, nt, nr, seed + s), w, power);
        const auto q = random_feasible_covariances(users, nr, power, src);
        const double gap = std::abs(evaluate_objective(inst, q) - ordering_oracle(inst, q).objective);
        rep.max_discrepancy = std::max(rep.max_discrepancy, gap);
        ++rep.samples;
    }
    rep.passed = rep.max_discrepancy <= 1e-9;
    return rep;
}

// ---------------------------------------------------------------------------
// projection verification

struct GridMaximum {
    double mu = 0.0;
    double psi = -std::numeric_limits<double>::infinity();
};

/// Brute-force maximum of psi over mu in [0, max(lambda_max, 0)], sampled at
/// `points` uniform points plus every non-negative eigenvalue.
inline GridMaximum grid_maximize_psi(const RealVector& eigenvalues, double power, double norm_d_sq,
                                     std::size_t points = 10'000'000)
{
    std::vector<double> lam(eigenvalues.data(), eigenvalues.data() + eigenvalues.size());
    std::sort(lam.begin(), lam.end(), std::greater<>());
    const double top = lam.empty() ? 0.0 : std::max(lam.front(), 0.0);

    // Sweep mu downward; count/s1/s2 track the eigenvalues strictly above mu.
    std::size_t count = 0;
    double s1 = 0.0;
    double s2 = 0.0;
    GridMaximum best;
    auto visit = [&](double mu) {
        while (count < lam.size() && lam[count] > mu) {
            s1 += lam[count];
            s2 += lam[count] * lam[count];
            ++count;
        }
        const double v = -0.5 * (s2 - 2.0 * mu * s1 + static_cast<double>(count) * mu * mu) - mu * power + 0.5 * norm_d_sq;
        if (v > best.psi) best = {mu, v};
    };

    std::size_t next_break = 0;
    const std::size_t n = std::max<std::size_t>(points, 2);
    for (std::size_t t = 0; t < n; ++t) {
        const double mu = top * (1.0 - static_cast<double>(t) / static_cast<double>(n - 1));
        while (next_break < lam.size() && lam[next_break] >= mu) {
            if (lam[next_break] >= 0.0 && lam[next_break] <= top) visit(lam[next_break]);
            ++next_break;
        }
        visit(mu);
    }
    return best;
}

struct ProjectionReport {
    std::size_t samples = 0;
    double worst_competitor_margin = std::numeric_limits<double>::infinity();  // min ||Z-D|| - ||P(D)-D||
    double worst_psi_gap = 0.0;        // max |psi(mu*) - grid max|
    double worst_idempotence = 0.0;    // max ||P(P(D)) - P(D)||_F
    double worst_complementarity = 0.0;  // max |mu* (Tr P(D) - P)|
    double worst_infeasibility = 0.0;  // max trace excess / negative eigenvalue
    std::size_t max_active_index = 0;
    bool passed = false;
};

struct ProjectionCheckOptions {
    std::size_t users = 3;
    Eigen::Index nr = 3;
    std::uint64_t seed = 1;
    std::size_t samples = 500;
    std::size_t competitors = 1000;
    std::size_t grid_points = 10'000'000;
};

namespace detail {

inline double block_distance(const std::vector<HermitianMatrix>& a, const std::vector<HermitianMatrix>& b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i].matrix() - b[i].matrix()).squaredNorm();
    return std::sqrt(s);
}

}  // namespace detail

/// Checks `project_sum_power` on random mixed-sign inputs against sampled
/// feasible competitors, the psi grid maximum, idempotence and
/// complementary slackness.
inline ProjectionReport verify_projection(const ProjectionCheckOptions& opt)
{
    ComplexGaussianSource src(opt.seed);
    ProjectionReport rep;
    for (std::size_t s = 0; s < opt.samples; ++s) {
        const double power = 0.5 + 4.5 * src.uniform();
        std::vector<HermitianMatrix> d;
        for (std::size_t u = 0; u < opt.users; ++u) {
            const double shift = -1.0 + 3.0 * src.uniform();
            d.push_back(random_hermitian(opt.nr, src) + shift * HermitianMatrix::identity(opt.nr));
        }
        const auto out = project_sum_power(d, power);
        const auto& p = out.projected.blocks;
        const double own = detail::block_distance(p, d);

        // competitors: half global random feasible points, half perturbations of the projection
        for (std::size_t c = 0; c < opt.competitors; ++c) {
            CovarianceSet z;
            if (c % 2 == 0) {
                z = random_feasible_covariances(opt.users, opt.nr, power, src);
            } else {
                const double radius = std::pow(10.0, -4.0 + 3.0 * src.uniform());
                for (const auto& b : p) z.blocks.push_back(psd_part(b + random_hermitian(opt.nr, src, radius)));
                const double tr = z.total_trace();
                if (tr > power)
                    for (auto& b : z.blocks) b = (power / tr) * b;
            }
            rep.worst_competitor_margin = std::min(rep.worst_competitor_margin, detail::block_distance(z.blocks, d) - own);
        }

        const auto spectrum = block_eigenvalues(BlockDiagonal{d});
        const double norm_sq = spectrum.values.squaredNorm();
        const auto grid = grid_maximize_psi(spectrum.values, power, norm_sq, opt.grid_points);
        rep.worst_psi_gap = std::max(rep.worst_psi_gap, std::abs(out.dual_value - grid.psi));

        const auto twice = project_sum_power(p, power);
        rep.worst_idempotence = std::max(rep.worst_idempotence, detail::block_distance(twice.projected.blocks, p));

        rep.worst_complementarity = std::max(rep.worst_complementarity, std::abs(out.water_level * (out.trace_after - power)));
        const auto feas = feasibility_check(out.projected, power);
        rep.worst_infeasibility = std::max({rep.worst_infeasibility, -feas.trace_slack, -feas.min_eigenvalue});
        rep.max_active_index = std::max(rep.max_active_index, out.active_index);
        ++rep.samples;
    }
    rep.passed = rep.worst_competitor_margin >= -1e-12 && rep.worst_psi_gap <= 1e-9 && rep.worst_idempotence <= 1e-10 &&
                 rep.worst_complementarity <= 1e-8 && rep.worst_infeasibility <= 1e-9 &&
                 rep.max_active_index <= opt.users * static_cast<std::size_t>(opt.nr);
    return rep;
}

// ---------------------------------------------------------------------------
// scaling benchmark

struct ScalingRow {
    std::size_t users = 0;
    double ms_per_iter = 0.0;
};

struct ScalingReport {
    std::vector<ScalingRow> rows;
    double slope = 0.0;  // least-squares slope of log(ms_per_iter) against log(K)
};

inline double loglog_slope(const std::vector<ScalingRow>& rows)
{
    if (rows.size() < 2) return 0.0;
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (const auto& r : rows) {
        const double x = std::log(static_cast<double>(r.users));
        const double y = std::log(r.ms_per_iter);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double n = static_cast<double>(rows.size());
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

/// Mean wall time per CGP iteration for each K (best of `repeats` solves of
/// `iters` iterations). Weights are drawn uniformly from [0.5, 1.5] so every
/// user contributes its own log-determinant term.
inline ScalingReport scaling_benchmark(const std::vector<std::size_t>& users_list, Eigen::Index nt, Eigen::Index nr,
                                       std::size_t iters, std::uint64_t seed, std::size_t repeats = 3)
{
    if (!std::is_sorted(users_list.begin(), users_list.end()))
        throw std::invalid_argument("scaling_benchmark: K list must be ascending");
    ScalingReport rep;
    for (const auto k : users_list) {
        ComplexGaussianSource wsrc(seed + k);
        std::vector<double> w(k);
        for (auto& x : w) x = 0.5 + wsrc.uniform();
        const auto inst = make_instance(generate_rayleigh_channels(k, nt, nr, seed), w, 10.0);
        OptimizerConfig cfg;
        cfg.max_iters = iters;
        cfg.epsilon = 1e-300;  // run the full iteration budget
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < std::max<std::size_t>(repeats, 1); ++r) {
            const auto t0 = std::chrono::steady_clock::now();
            const auto res = cgp_solve(inst, cfg);
            const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
            best = std::min(best, ms / static_cast<double>(std::max<std::size_t>(res.iterations(), 1)));
        }
        rep.rows.push_back({k, best});
    }
    rep.slope = loglog_slope(rep.rows);
    return rep;
}

}  // namespace mwsr
