#pragma once

// Synthetic markets and null-distribution experiments.

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "basketminer/marketdata.hpp"
#include "basketminer/report.hpp"

namespace bm {

enum class SynthKind { iid, planted };

struct SynthSpec {
    Index n_stocks = 30;
    Index days = 1;
    Index bars_per_day = 4140;
    int step_seconds = 5;
    std::uint64_t seed = 1;
    SynthKind kind = SynthKind::iid;

    // Planted market: x_{i,t} = beta_i u_t + noise_scale * eps_{i,t},
    // u an AR(1) with coefficient phi and unit innovation variance.
    double phi = -0.4;
    Eigen::VectorXd loadings;  // empty: drawn uniformly on [beta_lo, beta_hi]
    double beta_lo = 0.5;
    double beta_hi = 1.0;
    double noise_scale = 1.0;

    [[nodiscard]] Index length() const { return days * bars_per_day; }
    void validate() const;
};

/// N x T IID increments with standard deviation noise_scale.
[[nodiscard]] IncrementPanel synth_iid(const SynthSpec& spec);

struct PlantedMarket {
    IncrementPanel panel;
    Eigen::VectorXd loadings;   // beta as used
    Eigen::VectorXd direction;  // beta / |beta| (zero when beta is zero)
};

[[nodiscard]] PlantedMarket planted_market(const SynthSpec& spec);
[[nodiscard]] Eigen::VectorXd planted_loadings(const SynthSpec& spec);

/// Population symmetrised lag-1 matrix of the volatility-normalised panel.
[[nodiscard]] Eigen::MatrixXd planted_population_lag1(const SynthSpec& spec);
/// Its minimum-eigenvalue direction in closed form (phi < 0 only).
[[nodiscard]] Eigen::VectorXd planted_population_minimizer(const SynthSpec& spec);

/// Exact fractional Gaussian noise by circulant embedding; n must be a power of two.
[[nodiscard]] Eigen::VectorXd fgn(double H, Index n, std::uint64_t seed);
[[nodiscard]] double fgn_autocovariance(double H, Index k);

struct NullSpec {
    std::vector<Index> lengths{5000, 10000, 20000};
    Index runs = 2000;
    Index n_stocks = 30;
    std::uint64_t seed = 1;
    double bin_width = 0.01;
};

struct NullDistribution {
    Index length = 0;
    std::vector<double> rho_min;  // signed in-sample minimised lag-1 autocorrelation per run
    Histogram histogram;

    [[nodiscard]] double median_abs() const;
    [[nodiscard]] double fraction_abs_above(double threshold) const;
};

/// One run of the minimisation on an IID market; returns the basket's rho(1).
[[nodiscard]] double null_run(Index n_stocks, Index length, std::uint64_t key);
[[nodiscard]] std::vector<NullDistribution> null_min_autocorr(const NullSpec& spec);

struct HurstNullSpec {
    Index runs = 2000;
    Index days = 10;
    std::uint64_t seed = 1;
    double bin_width = 0.02;
};

struct HurstNull {
    std::vector<double> H;
    Histogram histogram{0.02};
    double mean = 0.0;
};

/// Random unit-norm baskets over random D-day stretches of `source`.
[[nodiscard]] HurstNull hurst_null(const IncrementPanel& source, const HurstNullSpec& spec);

}  // namespace bm
