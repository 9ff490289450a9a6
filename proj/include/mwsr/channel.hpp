// SPDX-License-Identifier: Apache-2.0
//
// Problem instances for the weighted sum-rate problem of a MIMO broadcast
// channel, evaluated through its dual multiple-access channel.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "mwsr/hermitian.hpp"

namespace mwsr {

/// K per-user channels H_i, each nr x nt.
struct ChannelSet {
    std::size_t users = 0;
    Eigen::Index nt = 0;
    Eigen::Index nr = 0;
    std::vector<ComplexMatrix> channels;

    void validate() const
    {
        if (users == 0 || nt <= 0 || nr <= 0) throw std::invalid_argument("ChannelSet: dimensions must be positive");
        if (channels.size() != users) throw std::invalid_argument("ChannelSet: channel count differs from K");
        for (const auto& h : channels) {
            if (h.rows() != nr || h.cols() != nt)
                throw std::invalid_argument("ChannelSet: channel matrix is not nr x nt");
            if (!detail::all_finite(h)) throw std::invalid_argument("ChannelSet: non-finite channel entry");
        }
    }
};

/// User weights together with their ascending order.
///
/// `order[p]` is the (0-based) user at sorted position p, and
/// `diffs[p] = weights[order[p]] - weights[order[p-1]]` with a zero weight
/// before the first position.
struct WeightProfile {
    std::vector<double> weights;
    std::vector<std::size_t> order;
    std::vector<double> diffs;

    std::size_t size() const { return weights.size(); }
};

inline WeightProfile ascending_permutation(const std::vector<double>& weights)
{
    if (weights.empty()) throw std::invalid_argument("ascending_permutation: empty weight vector");
    for (double w : weights)
        if (!(w >= 0.0) || !std::isfinite(w))
            throw std::invalid_argument("ascending_permutation: weights must be finite and non-negative");

    WeightProfile wp;
    wp.weights = weights;
    wp.order.resize(weights.size());
    std::iota(wp.order.begin(), wp.order.end(), std::size_t{0});
    std::stable_sort(wp.order.begin(), wp.order.end(),
                     [&](std::size_t a, std::size_t b) { return weights[a] < weights[b]; });
    wp.diffs.resize(weights.size());
    double prev = 0.0;
    for (std::size_t p = 0; p < weights.size(); ++p) {
        wp.diffs[p] = weights[wp.order[p]] - prev;
        prev = weights[wp.order[p]];
    }
    return wp;
}

/// Uplink covariances Q_i, one nr x nr block per user.
struct CovarianceSet {
    std::vector<HermitianMatrix> blocks;

    std::size_t size() const { return blocks.size(); }

    double total_trace() const
    {
        double t = 0.0;
        for (const auto& b : blocks) t += b.trace();
        return t;
    }

    static CovarianceSet zeros(std::size_t users, Eigen::Index nr)
    {
        return CovarianceSet{std::vector<HermitianMatrix>(users, HermitianMatrix::zero(nr))};
    }

    /// (P / (K nr)) I in every block.
    static CovarianceSet uniform(std::size_t users, Eigen::Index nr, double power)
    {
        const double level = power / (static_cast<double>(users) * static_cast<double>(nr));
        return CovarianceSet{std::vector<HermitianMatrix>(users, level * HermitianMatrix::identity(nr))};
    }
};

struct ProblemInstance {
    ChannelSet channels;
    WeightProfile weights;
    double power = 10.0;
    std::string label;

    std::size_t users() const { return channels.users; }

    void validate() const
    {
        channels.validate();
        if (weights.size() != channels.users) throw std::invalid_argument("ProblemInstance: weight count differs from K");
        if (!(power > 0.0) || !std::isfinite(power)) throw std::invalid_argument("ProblemInstance: power must be positive");
    }
};

inline ProblemInstance make_instance(ChannelSet channels, const std::vector<double>& weights, double power,
                                     std::string label = {})
{
    ProblemInstance inst{std::move(channels), ascending_permutation(weights), power, std::move(label)};
    inst.validate();
    return inst;
}

namespace detail {

inline void check_covariances(const ProblemInstance& inst, const CovarianceSet& q)
{
    if (q.size() != inst.users()) throw std::invalid_argument("covariance count differs from K");
    for (const auto& b : q.blocks)
        if (b.dim() != inst.channels.nr) throw std::invalid_argument("covariance block is not nr x nr");
}

// H^H Q H, an nt x nt Hermitian term.
inline ComplexMatrix uplink_term(const ComplexMatrix& h, const HermitianMatrix& q)
{
    return h.adjoint() * q.matrix() * h;
}

}  // namespace detail

/// Weighted sum of MAC rates in the ascending-weight decoding order:
/// sum_p diffs[p] * logdet(I + sum_{j >= p} H^H Q H), built from one running
/// sum that starts at the largest-weight user.
inline double evaluate_objective(const ProblemInstance& inst, const CovarianceSet& q)
{
    detail::check_covariances(inst, q);
    const auto k = inst.users();
    const auto& wp = inst.weights;
    ComplexMatrix running = ComplexMatrix::Identity(inst.channels.nt, inst.channels.nt);
    double total = 0.0;
    for (std::size_t p = k; p-- > 0;) {
        const auto user = wp.order[p];
        running += detail::uplink_term(inst.channels.channels[user], q.blocks[user]);
        if (wp.diffs[p] != 0.0) total += wp.diffs[p] * logdet_hpd(symmetrize(running));
    }
    return total;
}

/// Successive-decoding MAC rates for the ascending-weight order, returned in
/// the original user order.
inline std::vector<double> mac_user_rates(const ProblemInstance& inst, const CovarianceSet& q)
{
    detail::check_covariances(inst, q);
    const auto k = inst.users();
    const auto& wp = inst.weights;
    std::vector<double> rates(k, 0.0);
    ComplexMatrix running = ComplexMatrix::Identity(inst.channels.nt, inst.channels.nt);
    double previous = 0.0;
    for (std::size_t p = k; p-- > 0;) {
        const auto user = wp.order[p];
        running += detail::uplink_term(inst.channels.channels[user], q.blocks[user]);
        const double current = logdet_hpd(symmetrize(running));
        rates[user] = current - previous;
        previous = current;
    }
    return rates;
}

/// Dirty-paper-coding rates for downlink covariances Gamma_i (nt x nt) with
/// users encoded in index order 0..K-1.
inline std::vector<double> dpc_user_rates(const ChannelSet& channels, const std::vector<HermitianMatrix>& downlink)
{
    channels.validate();
    if (downlink.size() != channels.users) throw std::invalid_argument("dpc_user_rates: covariance count differs from K");
    for (const auto& g : downlink)
        if (g.dim() != channels.nt) throw std::invalid_argument("dpc_user_rates: covariance is not nt x nt");

    const auto k = channels.users;
    std::vector<double> rates(k, 0.0);
    ComplexMatrix tail = ComplexMatrix::Zero(channels.nt, channels.nt);  // sum_{j > i} Gamma_j
    const ComplexMatrix eye = ComplexMatrix::Identity(channels.nr, channels.nr);
    for (std::size_t i = k; i-- > 0;) {
        const auto& h = channels.channels[i];
        const double interference = logdet_hpd(symmetrize(eye + h * tail * h.adjoint()));
        tail += downlink[i].matrix();
        const double with_signal = logdet_hpd(symmetrize(eye + h * tail * h.adjoint()));
        rates[i] = with_signal - interference;
    }
    return rates;
}

struct FeasibilityReport {
    bool feasible = false;
    double trace_slack = 0.0;  // P - sum Tr(Q_i); negative when over budget
    double min_eigenvalue = 0.0;
};

inline FeasibilityReport feasibility_check(const CovarianceSet& q, double power)
{
    FeasibilityReport r;
    r.trace_slack = power - q.total_trace();
    r.min_eigenvalue = std::numeric_limits<double>::infinity();
    for (const auto& b : q.blocks) r.min_eigenvalue = std::min(r.min_eigenvalue, min_eigenvalue(b));
    r.feasible = r.min_eigenvalue >= -1e-9 && r.trace_slack >= -1e-9;
    return r;
}

/// Circularly-symmetric unit-variance complex Gaussian source over
/// std::mt19937_64 (Box-Muller on 53-bit uniforms), so streams are
/// reproducible across standard libraries.
class ComplexGaussianSource {
public:
    explicit ComplexGaussianSource(std::uint64_t seed) : engine_(seed) {}

    Complex next()
    {
        // u1 in (0, 1], u2 in [0, 1)
        const double u1 = 1.0 - uniform();
        const double u2 = uniform();
        const double radius = std::sqrt(-std::log(u1));  // variance 1/2 per component
        const double angle = 2.0 * std::numbers::pi * u2;
        return {radius * std::cos(angle), radius * std::sin(angle)};
    }

    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

inline ChannelSet generate_rayleigh_channels(std::size_t users, Eigen::Index nt, Eigen::Index nr, std::uint64_t seed)
{
    if (users == 0 || nt <= 0 || nr <= 0)
        throw std::invalid_argument("generate_rayleigh_channels: dimensions must be positive");
    ComplexGaussianSource src(seed);
    ChannelSet cs{users, nt, nr, {}};
    cs.channels.reserve(users);
    for (std::size_t u = 0; u < users; ++u) {
        ComplexMatrix h(nr, nt);
        for (Eigen::Index i = 0; i < nr; ++i)
            for (Eigen::Index j = 0; j < nt; ++j) h(i, j) = src.next();
        cs.channels.push_back(std::move(h));
    }
    return cs;
}

struct OrderingResult {
    double objective = 0.0;
    std::vector<std::size_t> order;  // decoding order, first decoded user first
};

/// Exhaustive search over all K! successive-decoding orders of the MAC
/// vertex rates. Each order is evaluated from scratch.
inline OrderingResult ordering_oracle(const ProblemInstance& inst, const CovarianceSet& q)
{
    detail::check_covariances(inst, q);
    const auto k = inst.users();
    if (k > 8) throw std::invalid_argument("ordering_oracle: K too large for enumeration (max 8)");

    const auto nt = inst.channels.nt;
    std::vector<ComplexMatrix> terms;
    terms.reserve(k);
    for (std::size_t u = 0; u < k; ++u) terms.push_back(detail::uplink_term(inst.channels.channels[u], q.blocks[u]));

    auto logdet_of_tail = [&](const std::vector<std::size_t>& order, std::size_t from) {
        ComplexMatrix s = ComplexMatrix::Identity(nt, nt);
        for (std::size_t j = from; j < order.size(); ++j) s += terms[order[j]];
        return logdet_hpd(symmetrize(s));
    };

    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), std::size_t{0});
    OrderingResult best{-std::numeric_limits<double>::infinity(), order};
    do {
        double value = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            const double rate = logdet_of_tail(order, i) - logdet_of_tail(order, i + 1);
            value += inst.weights.weights[order[i]] * rate;
        }
        if (value > best.objective) best = {value, order};
    } while (std::next_permutation(order.begin(), order.end()));
    return best;
}

constexpr double nats_to_bits(double nats) { return nats / std::numbers::ln2; }

}  // namespace mwsr
