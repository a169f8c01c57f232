#include <doctest.h>

#include <cmath>
#include <numbers>
#include <tuple>
#include <vector>

#include "basketminer/error.hpp"
#include "basketminer/montecarlo.hpp"
#include "basketminer/rng.hpp"
#include "basketminer/stats.hpp"
#include "oracles.hpp"

using namespace bm;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> xs) {
    Eigen::VectorXd v(static_cast<Index>(xs.size()));
    Index i = 0;
    for (double x : xs) v(i++) = x;
    return v;
}

oracle::Vec to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

TEST_CASE("sample_autocorr hand-computed values") {
    CHECK(sample_autocorr(vec({1, -1, 1, -1}), 1).rho == doctest::Approx(-0.75).epsilon(1e-15));
    CHECK(sample_autocorr(vec({1, 2, 3, 4, 5}), 1).rho == doctest::Approx(0.4).epsilon(1e-15));

    const auto e = sample_autocorr(vec({1, 2, 3, 4, 5}), 1);
    CHECK(e.n == 5);
    CHECK(e.lag == 1);
    CHECK(e.ci_halfwidth == doctest::Approx(2.0 / std::sqrt(5.0)));
}

TEST_CASE("sample_autocorr drops pairs that straddle a day start") {
    // d = (-1.5, -0.5, 0.5, 1.5); the (t=1, t=2) pair crosses the start at 2.
    const std::vector<Index> starts{0, 2};
    CHECK(sample_autocorr(vec({1, 2, 3, 4}), 1, starts).rho == doctest::Approx(1.5 / 5.0));
    CHECK(sample_autocorr(vec({1, 2, 3, 4}), 1).rho == doctest::Approx(1.25 / 5.0));
}

TEST_CASE("sample_autocorr errors") {
    try {
        (void)sample_autocorr(vec({3, 3, 3, 3}), 1);
        FAIL("expected degenerate series");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::degenerate_series);
    }
    try {
        (void)sample_autocorr(vec({1, 2}), 1);
        FAIL("expected insufficient data");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::insufficient_data);
    }
    CHECK_THROWS_AS((void)sample_autocorr(vec({1, 2, 3}), 0), Error);
}

TEST_CASE("sample_autocorr matches the loop oracle, is affine invariant and bounded") {
    CounterRng rng(derive_seed(11, 0));
    for (int trial = 0; trial < 2000; ++trial) {
        const Index n = 3 + static_cast<Index>(rng.uniform() * 200);
        const Index k = 1 + static_cast<Index>(rng.uniform() * static_cast<double>(std::min<Index>(n - 2, 5)));
        Eigen::VectorXd y = rng.normal_vector(n);
        if (trial % 3 == 0) y = y.array().sign();  // heavy ties
        if ((y.array() == y(0)).all()) continue;
        const double rho = sample_autocorr(y, k).rho;
        CHECK(std::abs(rho) <= 1.0);
        CHECK(rho == doctest::Approx(oracle::autocorr(to_std(y), static_cast<std::size_t>(k))).epsilon(1e-12));
        const double a = rng.uniform(-5, 5) + (rng.uniform() < 0.5 ? 0.1 : -0.1);
        const double b = rng.uniform(-100, 100);
        const Eigen::VectorXd z = (a * y.array() + b).matrix();
        CHECK(std::abs(sample_autocorr(z, k).rho - rho) <= 1e-12);
    }
}

TEST_CASE("ci_halfwidth") {
    CHECK(ci_halfwidth(100) == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(ci_halfwidth(4140) == doctest::Approx(0.031086).epsilon(1e-4));
    CHECK(ci_halfwidth(20700) == doctest::Approx(0.013901).epsilon(1e-4));
    CHECK_THROWS_AS((void)ci_halfwidth(3), Error);
}

TEST_CASE("periodogram of a pure tone") {
    const Index n = 64;
    Eigen::VectorXd y(n);
    for (Index t = 0; t < n; ++t) y(t) = std::cos(2.0 * std::numbers::pi * static_cast<double>(t + 1) * 16.0 / 64.0);
    const auto p = periodogram(y);
    REQUIRE(p.intensity.size() == 31);
    const double peak = p.intensity(15);
    CHECK(p.frequency(15) == doctest::Approx(2.0 * std::numbers::pi * 16.0 / 64.0));
    for (Index j = 0; j < p.intensity.size(); ++j)
        if (j != 15) CHECK(p.intensity(j) <= 1e-10 * peak);
}

TEST_CASE("periodogram of zeros is zero") {
    const auto p = periodogram(Eigen::VectorXd::Zero(40));
    CHECK(p.intensity.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("periodogram satisfies Parseval and matches the direct DFT") {
    CounterRng rng(derive_seed(5, 1));
    for (Index n : {17, 101, 257, 999}) {
        Eigen::VectorXd y = rng.normal_vector(n);
        y.array() -= y.mean();
        const auto p = periodogram(y);
        const double parseval = 2.0 * p.intensity.sum() * (2.0 * std::numbers::pi / static_cast<double>(n));
        const double variance = y.squaredNorm() / static_cast<double>(n);
        CHECK(parseval == doctest::Approx(variance).epsilon(1e-6));

        const auto direct = oracle::periodogram(to_std(y));
        REQUIRE(direct.size() == static_cast<std::size_t>(p.intensity.size()));
        for (std::size_t j = 0; j < direct.size(); ++j)
            CHECK(p.intensity(static_cast<Index>(j)) == doctest::Approx(direct[j]).epsilon(1e-8).scale(1e-12));
    }
    CHECK_THROWS_AS((void)periodogram(Eigen::VectorXd::Ones(15)), Error);
}

TEST_CASE("hurst_periodogram on white noise is unbiased") {
    double sum = 0;
    const int seeds = 200;
    for (int s = 0; s < seeds; ++s) {
        CounterRng rng(derive_seed(77, static_cast<std::uint64_t>(s)));
        const auto h = hurst_periodogram(rng.normal_vector(4140));
        CHECK(h.n_frequencies_used == 64);
        CHECK(h.H == doctest::Approx((1.0 - h.slope) / 2.0));
        sum += h.H;
    }
    const double mean = sum / seeds;
    CHECK(mean >= 0.45);
    CHECK(mean <= 0.55);
}

TEST_CASE("hurst_periodogram recovers H on exact fGn") {
    for (auto [H, lo, hi] : {std::tuple{0.7, 0.63, 0.77}, std::tuple{0.3, 0.23, 0.37}}) {
        double sum = 0;
        for (int s = 0; s < 200; ++s) sum += hurst_periodogram(fgn(H, 4096, static_cast<std::uint64_t>(s))).H;
        const double mean = sum / 200;
        CAPTURE(H);
        CHECK(mean >= lo);
        CHECK(mean <= hi);
    }
}

TEST_CASE("hurst_periodogram errors") {
    CHECK_THROWS_AS((void)hurst_periodogram(Eigen::VectorXd::Ones(255)), Error);
    try {
        (void)hurst_periodogram(Eigen::VectorXd::Zero(256));
        FAIL("expected insufficient data");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::insufficient_data);
    }
}
