#pragma once

// Time-series estimators: sample autocorrelation with its two-sigma band,
// the raw periodogram and the log-periodogram Hurst regression.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <unsupported/Eigen/FFT>

#include "basketminer/error.hpp"

namespace bm {

using Eigen::Index;

template <typename Scalar>
struct AutocorrEstimate {
    Scalar rho{};
    Index lag = 0;
    Index n = 0;
    Scalar ci_halfwidth{};
};

template <typename Scalar>
struct HurstEstimate {
    Scalar H{};  // raw regression output, not clipped
    Index n_frequencies_used = 0;
    Scalar slope{};
};

template <typename Scalar>
struct Periodogram {
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> frequency;
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> intensity;
};

/// Half-width of the 95% band for a lag-k autocorrelation of n IID samples.
template <typename Scalar = double>
[[nodiscard]] Scalar ci_halfwidth(Index n) {
    if (n < 4) throw Error(Errc::insufficient_data, "ci_halfwidth needs n >= 4, got " + std::to_string(n));
    return Scalar(2) / std::sqrt(Scalar(n));
}

namespace detail {

// Marks the lag-k pairs (t, t+k) that cross one of the day starts.
inline std::vector<char> straddle_mask(Index n, Index k, std::span<const Index> day_starts) {
    std::vector<char> mask(static_cast<std::size_t>(n - k), 0);
    for (Index b : day_starts) {
        if (b <= 0 || b >= n) continue;
        for (Index t = std::max<Index>(0, b - k); t < b && t < n - k; ++t) mask[static_cast<std::size_t>(t)] = 1;
    }
    return mask;
}

}  // namespace detail

/// Lag-k sample autocorrelation, demeaned with the full-sample mean and
/// normalised by the full-sample sum of squares. Pairs straddling a day
/// start are dropped from the numerator when `day_starts` is supplied.
template <typename Derived>
[[nodiscard]] AutocorrEstimate<typename Derived::Scalar> sample_autocorr(const Eigen::MatrixBase<Derived>& y, Index k,
                                                                         std::span<const Index> day_starts = {}) {
    EIGEN_STATIC_ASSERT_VECTOR_ONLY(Derived)
    using Scalar = typename Derived::Scalar;
    const Index n = y.size();
    if (k < 1) throw Error(Errc::contract_violation, "autocorrelation lag must be >= 1");
    if (n < k + 2) {
        throw Error(Errc::insufficient_data,
                    "autocorrelation at lag " + std::to_string(k) + " needs n >= k+2, got " + std::to_string(n));
    }
    const auto yv = y.derived().eval();
    if ((yv.array() == yv(0)).all()) throw Error(Errc::degenerate_series, "constant series has zero variance");

    const Scalar mean = yv.mean();
    const Eigen::Array<Scalar, Eigen::Dynamic, 1> d = yv.array() - mean;
    const Scalar denom = d.square().sum();
    if (!(denom > Scalar(0))) throw Error(Errc::degenerate_series, "zero variance after demeaning");

    Scalar num = (d.head(n - k) * d.tail(n - k)).sum();
    if (!day_starts.empty()) {
        const auto mask = detail::straddle_mask(n, k, day_starts);
        for (Index t = 0; t < n - k; ++t)
            if (mask[static_cast<std::size_t>(t)]) num -= d(t) * d(t + k);
    }
    return {num / denom, k, n, Scalar(2) / std::sqrt(Scalar(n))};
}

/// I_j = |sum_t y_t exp(-i t lambda_j)|^2 / (2 pi n) at lambda_j = 2 pi j / n,
/// j = 1 .. floor((n-1)/2).
template <typename Derived>
[[nodiscard]] Periodogram<typename Derived::Scalar> periodogram(const Eigen::MatrixBase<Derived>& y) {
    EIGEN_STATIC_ASSERT_VECTOR_ONLY(Derived)
    using Scalar = typename Derived::Scalar;
    const Index n = y.size();
    if (n < 16) throw Error(Errc::insufficient_data, "periodogram needs n >= 16, got " + std::to_string(n));

    std::vector<Scalar> in(static_cast<std::size_t>(n));
    for (Index t = 0; t < n; ++t) in[static_cast<std::size_t>(t)] = y(t);
    std::vector<std::complex<Scalar>> out;
    Eigen::FFT<Scalar> fft;
    fft.fwd(out, in);

    const Index m = (n - 1) / 2;
    const Scalar two_pi = Scalar(2) * std::numbers::pi_v<Scalar>;
    Periodogram<Scalar> p;
    p.frequency.resize(m);
    p.intensity.resize(m);
    for (Index j = 1; j <= m; ++j) {
        p.frequency(j - 1) = two_pi * Scalar(j) / Scalar(n);
        p.intensity(j - 1) = std::norm(out[static_cast<std::size_t>(j)]) / (two_pi * Scalar(n));
    }
    return p;
}

/// Log-periodogram regression over the lowest floor(sqrt(n)) Fourier
/// frequencies; H = (1 - slope) / 2.
template <typename Derived>
[[nodiscard]] HurstEstimate<typename Derived::Scalar> hurst_periodogram(const Eigen::MatrixBase<Derived>& y) {
    EIGEN_STATIC_ASSERT_VECTOR_ONLY(Derived)
    using Scalar = typename Derived::Scalar;
    const Index n = y.size();
    if (n < 256) throw Error(Errc::insufficient_data, "hurst_periodogram needs n >= 256, got " + std::to_string(n));

    Index m = static_cast<Index>(std::sqrt(static_cast<double>(n)));
    while (m * m > n) --m;
    while ((m + 1) * (m + 1) <= n) ++m;

    const auto p = periodogram(y);
    std::vector<Scalar> xs, zs;
    xs.reserve(static_cast<std::size_t>(m));
    zs.reserve(static_cast<std::size_t>(m));
    for (Index j = 0; j < m; ++j) {
        const Scalar I = p.intensity(j);
        if (!(I > Scalar(0)) || !std::isfinite(I)) continue;
        xs.push_back(std::log(p.frequency(j)));
        zs.push_back(std::log(I));
    }
    const Index used = static_cast<Index>(xs.size());
    if (used < 8) {
        throw Error(Errc::insufficient_data,
                    "only " + std::to_string(used) + " usable frequencies for the Hurst regression");
    }
    const Eigen::Map<const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>> x(xs.data(), used), z(zs.data(), used);
    const auto xc = (x.array() - x.mean()).eval();
    const Scalar slope = (xc * (z.array() - z.mean())).sum() / xc.square().sum();
    return {(Scalar(1) - slope) / Scalar(2), used, slope};
}

}  // namespace bm
