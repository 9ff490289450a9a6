// SPDX-License-Identifier: Apache-2.0
//
// Conjugate gradient projection for the weighted sum-rate problem of the
// dual MAC, plus the undeflected gradient projection baseline.
#pragma once

#include <chrono>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mwsr/channel.hpp"
#include "mwsr/hermitian.hpp"
#include "mwsr/projection.hpp"

namespace mwsr {

/// How the Fletcher-Reeves ratio is formed.
///
/// `projected` uses one ratio of squared norms of the projected gradient
/// P(Q + G) - Q, which vanishes at the constrained optimum. `per_block` uses
/// the raw gradient norms of each user block; at a constrained optimum the
/// raw gradient does not vanish, those ratios approach one and the direction
/// grows without bound until a restart.
enum class DeflectionRule { projected, per_block };

struct OptimizerConfig {
    double beta = 0.5;    // Armijo contraction
    double sigma = 0.1;   // Armijo slope fraction
    double epsilon = 1e-6;
    std::size_t max_iters = 1000;
    std::size_t max_armijo_trials = 40;
    bool deflection = true;
    DeflectionRule rule = DeflectionRule::projected;
    std::size_t reset_period = 0;  // 0: K * nr^2
    bool record_time = false;      // wall-clock column of the trace; off keeps traces reproducible

    void validate() const
    {
        if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("OptimizerConfig: beta must lie in (0, 1)");
        if (!(sigma > 0.0 && sigma < 1.0)) throw std::invalid_argument("OptimizerConfig: sigma must lie in (0, 1)");
        if (!(epsilon > 0.0)) throw std::invalid_argument("OptimizerConfig: epsilon must be positive");
        if (max_iters == 0 || max_armijo_trials == 0)
            throw std::invalid_argument("OptimizerConfig: iteration limits must be positive");
    }
};

/// One Hermitian nr x nr gradient (or search direction) block per user.
struct GradientSet {
    std::vector<HermitianMatrix> blocks;

    std::size_t size() const { return blocks.size(); }

    double squared_norm() const
    {
        double s = 0.0;
        for (const auto& b : blocks) s += b.squared_norm();
        return s;
    }
};

/// Re sum_i Tr(G_i^H (A_i - B_i)).
inline double directional_slope(const GradientSet& g, const CovarianceSet& a, const CovarianceSet& b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) s += inner(g.blocks[i].matrix(), a.blocks[i].matrix() - b.blocks[i].matrix());
    return s;
}

inline double max_elementwise_change(const CovarianceSet& a, const CovarianceSet& b)
{
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, detail::max_abs(a.blocks[i].matrix() - b.blocks[i].matrix()));
    return m;
}

/// Gradient of the weighted objective with respect to each Q_u:
///   G_{pi(j)} = 2 H [ sum_{i <= j} diffs_i S_i^{-1} ] H^H,
///   S_i = I + sum_{k >= i} H_{pi(k)}^H Q_{pi(k)} H_{pi(k)}.
/// S_i comes from one running sum (K uplink-term additions per call), and
/// the weighted inverse sum is accumulated in one pass over j.
inline GradientSet weighted_gradients(const ProblemInstance& inst, const CovarianceSet& q)
{
    detail::check_covariances(inst, q);
    const auto k = inst.users();
    const auto nt = inst.channels.nt;
    const auto& wp = inst.weights;

    std::vector<ComplexMatrix> inverses(k);
    ComplexMatrix running = ComplexMatrix::Identity(nt, nt);
    for (std::size_t p = k; p-- > 0;) {
        const auto user = wp.order[p];
        running += detail::uplink_term(inst.channels.channels[user], q.blocks[user]);
        if (wp.diffs[p] != 0.0) {
            const ComplexMatrix s = symmetrize(running).matrix();
            Eigen::LLT<ComplexMatrix> llt(s);
            if (llt.info() != Eigen::Success) throw NumericalError("weighted_gradients: singular running sum");
            inverses[p] = llt.solve(ComplexMatrix::Identity(nt, nt));
        }
    }

    GradientSet g{std::vector<HermitianMatrix>(k)};
    ComplexMatrix weighted = ComplexMatrix::Zero(nt, nt);
    for (std::size_t p = 0; p < k; ++p) {
        if (wp.diffs[p] != 0.0) weighted += wp.diffs[p] * inverses[p];
        const auto user = wp.order[p];
        const auto& h = inst.channels.channels[user];
        g.blocks[user] = symmetrize(2.0 * h * weighted * h.adjoint());
    }
    return g;
}

/// Fletcher-Reeves deflection, one ratio per user block:
///   G_u = Gbar_u + (||Gbar_u||^2 / ||Gprev_u||^2) D_u.
/// A block whose previous gradient vanished is left undeflected.
inline GradientSet deflect(const GradientSet& current, const GradientSet& previous_grad, const GradientSet& previous_dir)
{
    if (current.size() != previous_grad.size() || current.size() != previous_dir.size())
        throw std::invalid_argument("deflect: block count mismatch");
    GradientSet out{current.blocks};
    for (std::size_t u = 0; u < current.size(); ++u) {
        const double denom = previous_grad.blocks[u].squared_norm();
        if (denom == 0.0) continue;
        const double rho = current.blocks[u].squared_norm() / denom;
        out.blocks[u] = current.blocks[u] + rho * previous_dir.blocks[u];
    }
    return out;
}

/// G = Gbar + rho * D with one ratio for all blocks.
inline GradientSet deflect(const GradientSet& current, double rho, const GradientSet& previous_dir)
{
    if (current.size() != previous_dir.size()) throw std::invalid_argument("deflect: block count mismatch");
    GradientSet out{current.blocks};
    for (std::size_t u = 0; u < current.size(); ++u) out.blocks[u] = current.blocks[u] + rho * previous_dir.blocks[u];
    return out;
}

struct ArmijoResult {
    double alpha = 1.0;
    std::size_t trials = 0;  // m
    bool accepted = false;
    CovarianceSet point;
    double objective = 0.0;
};

/// Smallest m >= 0 with
///   F(Q + beta^m (target - Q)) - F(Q) >= sigma beta^m Re sum Tr(G^H (target - Q)).
/// `current_objective` is F(Q) when already known.
inline ArmijoResult armijo_step(const ProblemInstance& inst, const CovarianceSet& q, const GradientSet& reference_grad,
                                const CovarianceSet& target, const OptimizerConfig& config,
                                std::optional<double> current_objective = std::nullopt)
{
    const double f0 = current_objective ? *current_objective : evaluate_objective(inst, q);
    const double slope = directional_slope(reference_grad, target, q);

    std::vector<HermitianMatrix> direction;
    direction.reserve(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) direction.push_back(target.blocks[i] - q.blocks[i]);

    double alpha = 1.0;
    for (std::size_t m = 0; m < config.max_armijo_trials; ++m, alpha *= config.beta) {
        CovarianceSet trial;
        trial.blocks.reserve(q.size());
        for (std::size_t i = 0; i < q.size(); ++i) trial.blocks.push_back(q.blocks[i] + alpha * direction[i]);
        const double f = evaluate_objective(inst, trial);
        if (f - f0 >= config.sigma * alpha * slope) return {alpha, m, true, std::move(trial), f};
    }
    return {alpha, config.max_armijo_trials, false, q, f0};
}

struct IterationRecord {
    std::size_t iter = 0;
    double objective = 0.0;
    double grad_norm = 0.0;
    std::size_t armijo_m = 0;
    double water_level = 0.0;
    double max_delta = 0.0;
    double elapsed_ms = 0.0;
};

enum class SolveStatus { converged, max_iters, line_search_stalled };

inline const char* to_string(SolveStatus s)
{
    switch (s) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::max_iters: return "max_iters";
    case SolveStatus::line_search_stalled: return "line_search_stalled";
    }
    return "unknown";
}

struct SolveResult {
    CovarianceSet covariances;
    std::vector<IterationRecord> trace;
    SolveStatus status = SolveStatus::max_iters;
    double final_objective = 0.0;

    std::size_t iterations() const { return trace.size(); }
};

inline SolveResult cgp_solve(const ProblemInstance& inst, const OptimizerConfig& config,
                             std::optional<CovarianceSet> start = std::nullopt)
{
    inst.validate();
    config.validate();
    const auto k = inst.users();
    const auto nr = inst.channels.nr;
    const std::size_t reset_period =
        config.reset_period ? config.reset_period : k * static_cast<std::size_t>(nr * nr);

    CovarianceSet q = start ? std::move(*start) : CovarianceSet::uniform(k, nr, inst.power);
    detail::check_covariances(inst, q);
    if (!feasibility_check(q, inst.power).feasible)
        throw std::invalid_argument("cgp_solve: initial covariances are infeasible");

    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();

    SolveResult result;
    double f = evaluate_objective(inst, q);
    std::optional<GradientSet> previous_grad;
    std::optional<GradientSet> previous_dir;
    double previous_mapping_sq = 0.0;
    std::size_t since_reset = 0;

    auto project_along = [&](const GradientSet& dir) {
        std::vector<HermitianMatrix> trial;
        trial.reserve(k);
        for (std::size_t i = 0; i < k; ++i) trial.push_back(q.blocks[i] + dir.blocks[i]);  // unit trial step
        return project_sum_power(trial, inst.power);
    };

    for (std::size_t iter = 1; iter <= config.max_iters; ++iter) {
        const GradientSet grad = weighted_gradients(inst, q);
        auto plain = project_along(grad);

        double mapping_sq = 0.0;  // ||P(Q + G) - Q||^2
        if (config.rule == DeflectionRule::projected)
            for (std::size_t i = 0; i < k; ++i)
                mapping_sq += (plain.projected.blocks[i].matrix() - q.blocks[i].matrix()).squaredNorm();

        bool deflected = config.deflection && previous_dir && since_reset < reset_period;
        GradientSet dir = grad;
        if (deflected && config.rule == DeflectionRule::projected) {
            deflected = previous_mapping_sq > 0.0;
            if (deflected) dir = deflect(grad, mapping_sq / previous_mapping_sq, *previous_dir);
        } else if (deflected) {
            dir = deflect(grad, *previous_grad, *previous_dir);
        }
        previous_mapping_sq = mapping_sq;

        auto proj = deflected ? project_along(dir) : std::move(plain);
        if (deflected && directional_slope(grad, proj.projected, q) <= 0.0) {
            deflected = false;
            dir = grad;
            proj = project_along(dir);
        }
        since_reset = deflected ? since_reset + 1 : 1;

        auto step = armijo_step(inst, q, grad, proj.projected, config, f);

        IterationRecord rec;
        rec.iter = iter;
        rec.grad_norm = std::sqrt(grad.squared_norm());
        rec.armijo_m = step.trials;
        rec.water_level = proj.water_level;

        if (!step.accepted) {
            rec.objective = f;
            rec.max_delta = 0.0;
            if (config.record_time)
                rec.elapsed_ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
            result.trace.push_back(rec);
            result.status = SolveStatus::line_search_stalled;
            break;
        }

        rec.max_delta = max_elementwise_change(step.point, q);
        rec.objective = step.objective;
        if (config.record_time)
            rec.elapsed_ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
        result.trace.push_back(rec);

        q = std::move(step.point);
        f = step.objective;
        previous_grad = grad;
        previous_dir = std::move(dir);

        if (rec.max_delta < config.epsilon) {
            result.status = SolveStatus::converged;
            break;
        }
    }

    result.covariances = std::move(q);
    result.final_objective = f;
    return result;
}

/// Gradient projection baseline: cgp_solve without deflection.
inline SolveResult gp_solve(const ProblemInstance& inst, OptimizerConfig config,
                            std::optional<CovarianceSet> start = std::nullopt)
{
    config.deflection = false;
    return cgp_solve(inst, config, std::move(start));
}

}  // namespace mwsr
