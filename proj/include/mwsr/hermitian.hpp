// SPDX-License-Identifier: Apache-2.0
//
// Dense complex matrix helpers specialized for Hermitian operands:
// eigendecomposition, log-determinant, Frobenius distance and the
// PSD / NSD cone projections.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace mwsr {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

/// Raised when a factorization or eigen-solver fails on its input.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline double max_abs(const ComplexMatrix& a)
{
    double m = 0.0;
    for (Eigen::Index j = 0; j < a.cols(); ++j)
        for (Eigen::Index i = 0; i < a.rows(); ++i) m = std::max(m, std::abs(a(i, j)));
    return m;
}

inline bool all_finite(const ComplexMatrix& a)
{
    for (Eigen::Index j = 0; j < a.cols(); ++j)
        for (Eigen::Index i = 0; i < a.rows(); ++i)
            if (!std::isfinite(a(i, j).real()) || !std::isfinite(a(i, j).imag())) return false;
    return true;
}

inline void require_square(const ComplexMatrix& a, const char* what)
{
    if (a.rows() != a.cols() || a.rows() == 0)
        throw std::invalid_argument(std::string(what) + ": matrix must be square and non-empty");
}

// (A + A^H) / 2 with an exactly real diagonal.
inline ComplexMatrix hermitian_part(const ComplexMatrix& a)
{
    ComplexMatrix h = (a + a.adjoint()) * 0.5;
    for (Eigen::Index i = 0; i < h.rows(); ++i) h(i, i) = Complex(h(i, i).real(), 0.0);
    return h;
}

}  // namespace detail

/// A square complex matrix equal to its conjugate transpose.
///
/// Construction from a general matrix accepts inputs that are Hermitian up
/// to rounding (relative skew below 1e-8) and stores the exact Hermitian
/// part. Use `symmetrize` for inputs that are not nearly Hermitian.
class HermitianMatrix {
public:
    HermitianMatrix() = default;

    explicit HermitianMatrix(const ComplexMatrix& a)
    {
        detail::require_square(a, "HermitianMatrix");
        if (!detail::all_finite(a)) throw std::invalid_argument("HermitianMatrix: non-finite entry");
        const double skew = detail::max_abs(a - a.adjoint());
        if (skew > 1e-8 * (1.0 + detail::max_abs(a)))
            throw std::invalid_argument("HermitianMatrix: input is not Hermitian");
        m_ = detail::hermitian_part(a);
    }

    static HermitianMatrix zero(Eigen::Index dim) { return from_exact(ComplexMatrix::Zero(dim, dim)); }
    static HermitianMatrix identity(Eigen::Index dim) { return from_exact(ComplexMatrix::Identity(dim, dim)); }

    static HermitianMatrix diagonal(const RealVector& d)
    {
        ComplexMatrix m = ComplexMatrix::Zero(d.size(), d.size());
        for (Eigen::Index i = 0; i < d.size(); ++i) m(i, i) = d(i);
        return from_exact(std::move(m));
    }

    Eigen::Index dim() const { return m_.rows(); }
    const ComplexMatrix& matrix() const { return m_; }
    Complex operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

    double trace() const
    {
        double t = 0.0;
        for (Eigen::Index i = 0; i < m_.rows(); ++i) t += m_(i, i).real();
        return t;
    }

    double squared_norm() const { return m_.squaredNorm(); }

    friend HermitianMatrix operator+(const HermitianMatrix& a, const HermitianMatrix& b)
    {
        return from_exact(a.m_ + b.m_);
    }
    friend HermitianMatrix operator-(const HermitianMatrix& a, const HermitianMatrix& b)
    {
        return from_exact(a.m_ - b.m_);
    }
    friend HermitianMatrix operator*(double s, const HermitianMatrix& a) { return from_exact(s * a.m_); }

private:
    friend HermitianMatrix symmetrize(const ComplexMatrix& a);

    // Caller guarantees `a` is exactly Hermitian (sums and real scalings of
    // Hermitian matrices are).
    static HermitianMatrix from_exact(ComplexMatrix a)
    {
        HermitianMatrix h;
        h.m_ = std::move(a);
        return h;
    }

    ComplexMatrix m_;
};

/// Returns (A + A^H) / 2.
inline HermitianMatrix symmetrize(const ComplexMatrix& a)
{
    detail::require_square(a, "symmetrize");
    return HermitianMatrix::from_exact(detail::hermitian_part(a));
}

/// Eigenvalues sorted non-increasing; column k of `vectors` pairs with value k.
struct EigenDecomposition {
    RealVector values;
    ComplexMatrix vectors;
};

inline EigenDecomposition eig_hermitian(const HermitianMatrix& a)
{
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(a.matrix());
    if (solver.info() != Eigen::Success)
        throw NumericalError("eig_hermitian: eigen-solver did not converge");

    const RealVector& ev = solver.eigenvalues();
    const Eigen::Index n = ev.size();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index l, Eigen::Index r) { return ev(l) > ev(r); });

    EigenDecomposition out{RealVector(n), ComplexMatrix(n, n)};
    for (Eigen::Index k = 0; k < n; ++k) {
        const auto src = order[static_cast<std::size_t>(k)];
        out.values(k) = ev(src);
        out.vectors.col(k) = solver.eigenvectors().col(src);
    }
    return out;
}

/// U diag(values) U^H for a unitary U.
inline HermitianMatrix reconstruct(const ComplexMatrix& vectors, const RealVector& values)
{
    return symmetrize(vectors * values.cast<Complex>().asDiagonal() * vectors.adjoint());
}

/// Natural-log determinant of a Hermitian positive definite matrix via Cholesky.
inline double logdet_hpd(const ComplexMatrix& a)
{
    detail::require_square(a, "logdet_hpd");
    Eigen::LLT<ComplexMatrix> llt(a);
    if (llt.info() != Eigen::Success) throw NumericalError("logdet_hpd: matrix is not positive definite");
    const auto& l = llt.matrixLLT();
    double acc = 0.0;
    for (Eigen::Index i = 0; i < l.rows(); ++i) {
        const double pivot = l(i, i).real();
        if (!(pivot > 0.0) || !std::isfinite(pivot))
            throw NumericalError("logdet_hpd: matrix is not positive definite");
        acc += std::log(pivot);
    }
    return 2.0 * acc;
}

inline double logdet_hpd(const HermitianMatrix& a) { return logdet_hpd(a.matrix()); }

inline double frobenius_distance(const ComplexMatrix& a, const ComplexMatrix& b)
{
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw std::invalid_argument("frobenius_distance: dimension mismatch");
    return (a - b).norm();
}

inline double frobenius_distance(const HermitianMatrix& a, const HermitianMatrix& b)
{
    return frobenius_distance(a.matrix(), b.matrix());
}

/// Projection onto the PSD cone: U diag(max(lambda, 0)) U^H.
inline HermitianMatrix psd_part(const HermitianMatrix& a)
{
    auto e = eig_hermitian(a);
    return reconstruct(e.vectors, e.values.cwiseMax(0.0));
}

/// Projection onto the NSD cone: U diag(min(lambda, 0)) U^H.
inline HermitianMatrix nsd_part(const HermitianMatrix& a)
{
    auto e = eig_hermitian(a);
    return reconstruct(e.vectors, e.values.cwiseMin(0.0));
}

inline double min_eigenvalue(const HermitianMatrix& a)
{
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(a.matrix(), Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw NumericalError("min_eigenvalue: eigen-solver did not converge");
    return solver.eigenvalues()(0);
}

/// Re Tr(A^H B).
inline double inner(const ComplexMatrix& a, const ComplexMatrix& b)
{
    return (a.conjugate().cwiseProduct(b)).sum().real();
}

}  // namespace mwsr
