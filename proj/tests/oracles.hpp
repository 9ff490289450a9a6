// SPDX-License-Identifier: Apache-2.0
//
// Independent reference computations used only by the test suites.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "mwsr/mwsr.hpp"

namespace mwsr::oracle {

/// sum_p diffs[p] * logdet(I + sum_{j >= p} ...) with every inner sum rebuilt
/// from scratch.
inline double naive_objective(const ProblemInstance& inst, const CovarianceSet& q)
{
    const auto k = inst.users();
    const auto nt = inst.channels.nt;
    double total = 0.0;
    for (std::size_t p = 0; p < k; ++p) {
        ComplexMatrix s = ComplexMatrix::Identity(nt, nt);
        for (std::size_t j = p; j < k; ++j) {
            const auto u = inst.weights.order[j];
            const auto& h = inst.channels.channels[u];
            s += h.adjoint() * q.blocks[u].matrix() * h;
        }
        const double logdet = Eigen::SelfAdjointEigenSolver<ComplexMatrix>(s).eigenvalues().array().log().sum();
        total += inst.weights.diffs[p] * logdet;
    }
    return total;
}

/// Classical water-filling capacity max sum log(1 + p_k g_k), sum p_k <= P.
inline double waterfilling_capacity(std::vector<double> gains, double power)
{
    std::sort(gains.begin(), gains.end(), std::greater<>());
    while (!gains.empty() && gains.back() <= 0.0) gains.pop_back();
    for (std::size_t n = gains.size(); n >= 1; --n) {
        double inv = 0.0;
        for (std::size_t i = 0; i < n; ++i) inv += 1.0 / gains[i];
        const double level = (power + inv) / static_cast<double>(n);
        if (level > 1.0 / gains[n - 1]) {
            double cap = 0.0;
            for (std::size_t i = 0; i < n; ++i) cap += std::log(level * gains[i]);
            return cap;
        }
    }
    return 0.0;
}

/// Single-user capacity with channel H (nr x nt) under trace budget P.
inline double single_user_capacity(const ComplexMatrix& h, double power)
{
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h.adjoint() * h);
    const auto& ev = es.eigenvalues();
    return waterfilling_capacity(std::vector<double>(ev.data(), ev.data() + ev.size()), power);
}

/// Gradient blocks reconstructed from central differences of `f` along the
/// Hermitian coordinates of each block: diagonal entries x_kk and the real
/// and imaginary parts (a, b) of each upper entry. With the convention
/// grad = 2 (df/dz)^*, entry (k, l) equals df/da + i df/db off the diagonal
/// and 2 df/dx_kk on it.
inline std::vector<ComplexMatrix> finite_difference_gradient(const std::function<double(const CovarianceSet&)>& f,
                                                             const CovarianceSet& q, double step)
{
    std::vector<ComplexMatrix> out;
    for (std::size_t u = 0; u < q.size(); ++u) {
        const auto n = q.blocks[u].dim();
        ComplexMatrix g = ComplexMatrix::Zero(n, n);
        auto derivative = [&](const ComplexMatrix& dir) {
            CovarianceSet plus = q;
            CovarianceSet minus = q;
            plus.blocks[u] = HermitianMatrix(q.blocks[u].matrix() + step * dir);
            minus.blocks[u] = HermitianMatrix(q.blocks[u].matrix() - step * dir);
            return (f(plus) - f(minus)) / (2.0 * step);
        };
        for (Eigen::Index k = 0; k < n; ++k) {
            ComplexMatrix e = ComplexMatrix::Zero(n, n);
            e(k, k) = 1.0;
            g(k, k) = 2.0 * derivative(e);
            for (Eigen::Index l = k + 1; l < n; ++l) {
                ComplexMatrix re = ComplexMatrix::Zero(n, n);
                re(k, l) = 1.0;
                re(l, k) = 1.0;
                ComplexMatrix im = ComplexMatrix::Zero(n, n);
                im(k, l) = Complex(0.0, 1.0);
                im(l, k) = Complex(0.0, -1.0);
                g(k, l) = Complex(derivative(re), derivative(im));
                g(l, k) = std::conj(g(k, l));
            }
        }
        out.push_back(std::move(g));
    }
    return out;
}

/// Lagrangian dual value -1/2 ||D - mu I + X||^2 - mu P + 1/2 ||D||^2 with
/// X = -(D - mu I)_-, evaluated on the dense block-diagonal assembly.
inline double dense_dual_objective(const std::vector<HermitianMatrix>& blocks, double mu, double power)
{
    const ComplexMatrix d = BlockDiagonal{blocks}.dense();
    const auto n = d.rows();
    const ComplexMatrix shifted = d - mu * ComplexMatrix::Identity(n, n);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(shifted);
    const RealVector neg = es.eigenvalues().cwiseMin(0.0);
    const ComplexMatrix x = -(es.eigenvectors() * neg.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint());
    return -0.5 * (shifted + x).squaredNorm() - mu * power + 0.5 * d.squaredNorm();
}

/// Random n x n complex Gaussian matrix.
inline ComplexMatrix random_matrix(Eigen::Index rows, Eigen::Index cols, ComplexGaussianSource& src)
{
    ComplexMatrix a(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) a(i, j) = src.next();
    return a;
}

inline HermitianMatrix random_psd(Eigen::Index n, ComplexGaussianSource& src, Eigen::Index rank = -1)
{
    const ComplexMatrix a = random_matrix(n, rank < 0 ? n : rank, src);
    return symmetrize(a * a.adjoint());
}

}  // namespace mwsr::oracle
