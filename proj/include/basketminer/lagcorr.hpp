#pragma once

// Delay-correlation machinery: volatility normalisation of an increment
// panel, the lag-k cross matrix and its symmetric part, and the
// minimum-eigenvalue basket.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Jacobi>

#include "basketminer/error.hpp"
#include "basketminer/stats.hpp"

namespace bm {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
struct NormalizedPanel {
    MatrixX<Scalar> M;              // N x T, row i scaled to unit sample sd
    VectorX<Scalar> scale_factors;  // per-row sample sd, T-1 denominator
};

template <typename Scalar>
struct LaggedCorrMatrix {
    MatrixX<Scalar> c_hat;  // asymmetric, c_hat(i,j) ~ <M_i,t M_j,t+k>
    MatrixX<Scalar> c_sym;  // (c_hat + c_hat^T) / 2
    Index lag = 1;
};

template <typename Scalar>
struct SymmetricEigen {
    VectorX<Scalar> values;   // ascending
    MatrixX<Scalar> vectors;  // column j pairs with values(j)
    int sweeps = 0;
};

template <typename Scalar>
struct BasketWeights {
    VectorX<Scalar> e;  // unit norm, largest-magnitude component positive
    Scalar lambda_min{};
    Scalar spectral_gap{};     // second-smallest minus smallest eigenvalue
    Index multiplicity = 1;    // eigenvalues within the degeneracy tolerance of lambda_min
    bool degenerate = false;
    VectorX<Scalar> spectrum;  // all eigenvalues, ascending
};

inline constexpr double kDegeneracyTolerance = 1e-10;
inline constexpr double kAsymmetryTolerance = 1e-10;

/// Divides each row by its sample standard deviation (T-1 denominator).
/// Rows are not demeaned. `names` is only used for the error message.
template <typename Derived>
[[nodiscard]] NormalizedPanel<typename Derived::Scalar> normalize(const Eigen::MatrixBase<Derived>& increments,
                                                                  std::span<const int> names = {}) {
    using Scalar = typename Derived::Scalar;
    const Index N = increments.rows();
    const Index T = increments.cols();
    if (T < 2) throw Error(Errc::insufficient_data, "normalize needs at least two increments per row");

    NormalizedPanel<Scalar> out;
    out.M.resize(N, T);
    out.scale_factors.resize(N);
    for (Index i = 0; i < N; ++i) {
        const auto row = increments.row(i);
        const Scalar mean = row.mean();
        const Scalar var = (row.array() - mean).square().sum() / Scalar(T - 1);
        if (!(var > Scalar(0))) {
            const std::string who = i < static_cast<Index>(names.size())
                                        ? "symbol " + std::to_string(names[static_cast<std::size_t>(i)])
                                        : "row " + std::to_string(i);
            throw Error(Errc::degenerate_stock, who + " has zero increment variance");
        }
        out.scale_factors(i) = std::sqrt(var);
        out.M.row(i) = row / out.scale_factors(i);
    }
    return out;
}

/// c_hat(i,j) = (1/T) sum_{t} M(i,t) M(j,t+k), dropping pairs (t, t+k)
/// that cross one of `day_starts`.
template <typename Derived>
[[nodiscard]] LaggedCorrMatrix<typename Derived::Scalar> lagged_corr(const Eigen::MatrixBase<Derived>& M, Index k,
                                                                     std::span<const Index> day_starts = {}) {
    using Scalar = typename Derived::Scalar;
    const Index T = M.cols();
    if (k < 1) throw Error(Errc::contract_violation, "lag must be >= 1");
    if (T <= k) {
        throw Error(Errc::insufficient_data,
                    "lagged_corr needs T > k, got T=" + std::to_string(T) + " k=" + std::to_string(k));
    }
    LaggedCorrMatrix<Scalar> out;
    out.lag = k;
    out.c_hat.noalias() = M.leftCols(T - k) * M.rightCols(T - k).transpose();
    if (!day_starts.empty()) {
        const auto mask = detail::straddle_mask(T, k, day_starts);
        for (Index t = 0; t < T - k; ++t)
            if (mask[static_cast<std::size_t>(t)]) out.c_hat.noalias() -= M.col(t) * M.col(t + k).transpose();
    }
    out.c_hat /= Scalar(T);
    out.c_sym = (out.c_hat + out.c_hat.transpose()) / Scalar(2);
    return out;
}

/// Cyclic Jacobi eigensolver for a symmetric matrix. Sweeps until every
/// off-diagonal magnitude is at most `rel_tol` times the Frobenius norm.
template <typename Derived>
[[nodiscard]] SymmetricEigen<typename Derived::Scalar> jacobi_eigen(const Eigen::MatrixBase<Derived>& matrix,
                                                                    typename Derived::Scalar rel_tol = 1e-12,
                                                                    int max_sweeps = 100) {
    using Scalar = typename Derived::Scalar;
    const Index N = matrix.rows();
    if (N != matrix.cols()) throw Error(Errc::contract_violation, "jacobi_eigen needs a square matrix");

    MatrixX<Scalar> A = matrix;
    MatrixX<Scalar> V = MatrixX<Scalar>::Identity(N, N);
    const Scalar threshold = rel_tol * A.norm();

    auto max_off = [&] {
        Scalar m = 0;
        for (Index j = 0; j < N; ++j)
            for (Index i = 0; i < j; ++i) m = std::max(m, std::abs(A(i, j)));
        return m;
    };

    int sweeps = 0;
    while (max_off() > threshold) {
        if (sweeps++ >= max_sweeps) throw Error(Errc::contract_violation, "Jacobi iteration did not converge");
        for (Index p = 0; p < N - 1; ++p) {
            for (Index q = p + 1; q < N; ++q) {
                if (A(p, q) == Scalar(0)) continue;
                Eigen::JacobiRotation<Scalar> rot;
                rot.makeJacobi(A, p, q);
                A.applyOnTheLeft(p, q, rot.adjoint());
                A.applyOnTheRight(p, q, rot);
                A(p, q) = A(q, p) = Scalar(0);
                V.applyOnTheRight(p, q, rot);
            }
        }
    }

    std::vector<Index> order(static_cast<std::size_t>(N));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return A(a, a) < A(b, b); });

    SymmetricEigen<Scalar> out;
    out.values.resize(N);
    out.vectors.resize(N, N);
    for (Index j = 0; j < N; ++j) {
        out.values(j) = A(order[static_cast<std::size_t>(j)], order[static_cast<std::size_t>(j)]);
        out.vectors.col(j) = V.col(order[static_cast<std::size_t>(j)]);
    }
    out.sweeps = sweeps;
    return out;
}

/// Flips `v` so that its first component of largest magnitude is positive.
template <typename Derived>
void fix_sign(Eigen::MatrixBase<Derived>& v) {
    using Scalar = typename Derived::Scalar;
    if (v.size() == 0) return;
    const Scalar peak = v.cwiseAbs().maxCoeff();
    const Scalar tie = peak * Scalar(1e-9);
    for (Index i = 0; i < v.size(); ++i) {
        if (std::abs(v(i)) >= peak - tie) {
            if (v(i) < Scalar(0)) v = -v;
            return;
        }
    }
}

template <typename Derived>
[[nodiscard]] BasketWeights<typename Derived::Scalar> min_eigvec(const Eigen::MatrixBase<Derived>& c_sym) {
    using Scalar = typename Derived::Scalar;
    const Index N = c_sym.rows();
    if (N < 2 || c_sym.cols() != N) throw Error(Errc::contract_violation, "min_eigvec needs a square matrix with N >= 2");
    const Scalar asym = (c_sym - c_sym.transpose()).cwiseAbs().maxCoeff();
    if (asym > Scalar(kAsymmetryTolerance)) {
        throw Error(Errc::contract_violation, "matrix is not symmetric (max asymmetry " + std::to_string(asym) + ")");
    }

    const auto eig = jacobi_eigen(c_sym);
    BasketWeights<Scalar> w;
    w.spectrum = eig.values;
    w.lambda_min = eig.values(0);
    w.spectral_gap = eig.values(1) - eig.values(0);
    w.multiplicity = (eig.values.array() - w.lambda_min < Scalar(kDegeneracyTolerance)).count();
    w.degenerate = w.multiplicity > 1;
    w.e = eig.vectors.col(0).normalized();
    fix_sign(w.e);
    return w;
}

template <typename Scalar>
[[nodiscard]] BasketWeights<Scalar> min_eigvec(const LaggedCorrMatrix<Scalar>& c) {
    return min_eigvec(c.c_sym);
}

/// B_t = sum_i e_i x_{i,t} on raw (unnormalised) increments.
template <typename Scalar, typename Derived>
[[nodiscard]] VectorX<Scalar> basket_series(const BasketWeights<Scalar>& weights, const Eigen::MatrixBase<Derived>& raw) {
    if (weights.e.size() != raw.rows()) {
        throw Error(Errc::contract_violation, "basket has " + std::to_string(weights.e.size()) + " weights but panel has " +
                                                  std::to_string(raw.rows()) + " rows");
    }
    return raw.transpose() * weights.e;
}

template <typename Derived>
[[nodiscard]] typename Derived::Scalar quadratic_form(const Eigen::MatrixBase<Derived>& C,
                                                      const VectorX<typename Derived::Scalar>& w) {
    return w.dot(C * w);
}

}  // namespace bm
