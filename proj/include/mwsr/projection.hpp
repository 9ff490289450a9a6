// SPDX-License-Identifier: Apache-2.0
//
// Euclidean projection of K Hermitian blocks onto
//   { Q_i >= 0, sum_i Tr(Q_i) <= P }.
//
// The blocks form D = diag(Q_1 ... Q_K). Eliminating the PSD multiplier from
// the Lagrangian dual leaves a scalar problem in the trace multiplier mu,
//   psi(mu) = -1/2 sum_j max(0, lambda_j - mu)^2 - mu P + 1/2 ||D||_F^2,
// which is concave and piecewise quadratic between consecutive eigenvalues
// of D. The maximizer mu* is found by sweeping those pieces from the top,
// and the projection shifts every eigenvalue down by mu* and clamps at zero
// while keeping the eigenvectors.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "mwsr/channel.hpp"
#include "mwsr/hermitian.hpp"

namespace mwsr {

/// diag(Q_1 ... Q_K), kept as blocks.
struct BlockDiagonal {
    std::vector<HermitianMatrix> blocks;

    Eigen::Index block_dim() const { return blocks.empty() ? 0 : blocks.front().dim(); }
    std::size_t block_count() const { return blocks.size(); }

    /// Dense (K nr) x (K nr) assembly; only for checks on small inputs.
    ComplexMatrix dense() const
    {
        Eigen::Index n = 0;
        for (const auto& b : blocks) n += b.dim();
        ComplexMatrix d = ComplexMatrix::Zero(n, n);
        Eigen::Index at = 0;
        for (const auto& b : blocks) {
            d.block(at, at, b.dim(), b.dim()) = b.matrix();
            at += b.dim();
        }
        return d;
    }
};

struct BlockSpectrum {
    RealVector values;                         // all eigenvalues, non-increasing
    std::vector<EigenDecomposition> per_block;  // for reconstruction
};

inline BlockSpectrum block_eigenvalues(const BlockDiagonal& d)
{
    struct Entry {
        double value;
        std::size_t block;
        Eigen::Index index;
    };
    BlockSpectrum out;
    out.per_block.reserve(d.blocks.size());
    std::vector<Entry> entries;
    for (std::size_t b = 0; b < d.blocks.size(); ++b) {
        out.per_block.push_back(eig_hermitian(d.blocks[b]));
        const auto& v = out.per_block.back().values;
        for (Eigen::Index i = 0; i < v.size(); ++i) entries.push_back({v(i), b, i});
    }
    // stable: ties keep block order, then in-block order
    std::stable_sort(entries.begin(), entries.end(), [](const Entry& l, const Entry& r) { return l.value > r.value; });
    out.values.resize(static_cast<Eigen::Index>(entries.size()));
    for (std::size_t i = 0; i < entries.size(); ++i) out.values(static_cast<Eigen::Index>(i)) = entries[i].value;
    return out;
}

namespace detail {

inline void require_non_increasing(const RealVector& v, const char* what)
{
    for (Eigen::Index i = 1; i < v.size(); ++i)
        if (v(i) > v(i - 1)) throw std::invalid_argument(std::string(what) + ": eigenvalues not sorted non-increasing");
}

}  // namespace detail

/// psi(mu) evaluated directly from the clamped spectrum.
inline double dual_psi(double mu, const RealVector& eigenvalues, double power, double norm_d_sq)
{
    if (mu < 0.0) throw std::invalid_argument("dual_psi: mu must be non-negative");
    double clamped = 0.0;
    for (Eigen::Index j = 0; j < eigenvalues.size(); ++j) {
        const double e = std::max(0.0, eigenvalues(j) - mu);
        clamped += e * e;
    }
    return -0.5 * clamped - mu * power + 0.5 * norm_d_sq;
}

struct WaterLevel {
    double mu_star = 0.0;
    std::size_t active_index = 0;  // number of eigenvalues above the water level piece
};

/// Maximizes psi over mu >= 0 by sweeping the pieces [lambda_{I+1}, lambda_I]
/// for I = 0, 1, ..., N (with lambda_0 = +inf, lambda_{N+1} = -inf). On piece
/// I the stationary point is (sum_{i<=I} lambda_i - P) / I; if it falls in
/// the piece it is the global maximizer, otherwise psi is monotone there and
/// the sweep compares the lower endpoint against the best value so far.
inline WaterLevel water_level_search(const RealVector& eigenvalues, double power)
{
    if (!(power > 0.0)) throw std::invalid_argument("water_level_search: power must be positive");
    detail::require_non_increasing(eigenvalues, "water_level_search");

    constexpr double tol = 1e-12;
    const auto n = static_cast<std::size_t>(eigenvalues.size());
    auto lambda = [&](std::size_t i) { return eigenvalues(static_cast<Eigen::Index>(i - 1)); };  // 1-based
    // lower end of piece I, clamped to the non-negative half-line
    auto lower = [&](std::size_t i) { return i < n ? std::max(lambda(i + 1), 0.0) : 0.0; };

    // psi restricted to piece I, up to the constant 1/2 ||D||^2:
    //   -1/2 (s2 - 2 mu s1 + I mu^2) - mu P
    double s1 = 0.0;
    double s2 = 0.0;
    auto piece_psi = [&](std::size_t i, double mu) {
        return -0.5 * (s2 - 2.0 * mu * s1 + static_cast<double>(i) * mu * mu) - mu * power;
    };

    // Piece 0 has no stationary point; psi = -mu P decreases, so the best
    // point is its lower end.
    WaterLevel best{lower(0), 0};
    double best_value = piece_psi(0, best.mu_star);
    if (n == 0 || lambda(1) <= 0.0) return best;

    for (std::size_t i = 1; i <= n; ++i) {
        s1 += lambda(i);
        s2 += lambda(i) * lambda(i);
        const double hi = lambda(i);
        const double lo = lower(i);
        const double candidate = (s1 - power) / static_cast<double>(i);
        if (candidate >= lo - tol && candidate <= hi + tol) {
            return {std::clamp(candidate, lo, std::max(lo, hi)), i};
        }
        const double at_lo = piece_psi(i, lo);
        if (at_lo < best_value) return best;
        best = {lo, i};
        best_value = at_lo;
        if (lo <= 0.0) return best;  // reached mu = 0; lower pieces are excluded
    }
    return best;
}

struct ProjectionOutcome {
    CovarianceSet projected;
    double water_level = 0.0;
    std::size_t active_index = 0;
    double dual_value = 0.0;
    double trace_after = 0.0;
};

inline ProjectionOutcome project_sum_power(const std::vector<HermitianMatrix>& blocks, double power)
{
    if (!(power > 0.0) || !std::isfinite(power)) throw std::invalid_argument("project_sum_power: power must be positive");
    if (blocks.empty()) throw std::invalid_argument("project_sum_power: no blocks");

    const BlockDiagonal d{blocks};
    const auto spectrum = block_eigenvalues(d);
    const auto level = water_level_search(spectrum.values, power);

    ProjectionOutcome out;
    out.water_level = level.mu_star;
    out.active_index = level.active_index;
    out.dual_value = dual_psi(level.mu_star, spectrum.values, power, spectrum.values.squaredNorm());
    out.projected.blocks.reserve(blocks.size());
    for (const auto& e : spectrum.per_block) {
        const RealVector shifted = (e.values.array() - level.mu_star).cwiseMax(0.0).matrix();
        out.projected.blocks.push_back(reconstruct(e.vectors, shifted));
    }
    out.trace_after = out.projected.total_trace();
    return out;
}

inline ProjectionOutcome project_sum_power(const CovarianceSet& q, double power)
{
    return project_sum_power(q.blocks, power);
}

}  // namespace mwsr
