#include "basketminer/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include <unsupported/Eigen/FFT>

#include "basketminer/error.hpp"
#include "basketminer/lagcorr.hpp"
#include "basketminer/parallel.hpp"
#include "basketminer/rng.hpp"
#include "basketminer/stats.hpp"

namespace bm {

namespace {

// Substream families.
constexpr std::uint64_t kTagIdiosyncratic = 1;
constexpr std::uint64_t kTagCommon = 2;
constexpr std::uint64_t kTagLoadings = 3;
constexpr std::uint64_t kTagFgn = 4;
constexpr std::uint64_t kTagHurstNull = 5;
constexpr std::uint64_t kTagNull = 0x100;

IncrementPanel empty_panel(const SynthSpec& spec) {
    IncrementPanel p;
    p.step_seconds = spec.step_seconds;
    for (Index i = 0; i < spec.n_stocks; ++i) p.symbols.push_back(static_cast<int>(i));
    for (Index d = 0; d < spec.days; ++d) {
        std::string name = std::to_string(d);
        name.insert(0, name.size() < 3 ? 3 - name.size() : 0, '0');
        p.days.push_back("synth-" + name);
        p.day_starts.push_back(d * spec.bars_per_day);
    }
    p.values.resize(spec.n_stocks, spec.length());
    return p;
}

void fill_noise(IncrementPanel& p, const SynthSpec& spec) {
    for (Index i = 0; i < spec.n_stocks; ++i) {
        CounterRng rng(derive_seed(spec.seed, static_cast<std::uint64_t>(i), kTagIdiosyncratic));
        for (Index t = 0; t < spec.length(); ++t) p.values(i, t) = spec.noise_scale * rng.normal();
    }
}

}  // namespace

void SynthSpec::validate() const {
    if (n_stocks < 2) throw Error(Errc::contract_violation, "synthetic market needs N >= 2");
    if (days < 1 || bars_per_day < 1) throw Error(Errc::contract_violation, "synthetic market needs a positive length");
    if (!(noise_scale > 0.0)) throw Error(Errc::contract_violation, "noise scale must be positive");
    if (kind == SynthKind::planted) {
        if (!(std::abs(phi) < 1.0)) throw Error(Errc::contract_violation, "AR(1) coefficient must satisfy |phi| < 1");
        if (loadings.size() != 0 && loadings.size() != n_stocks) {
            throw Error(Errc::contract_violation, "loadings must have one entry per stock");
        }
        if (loadings.size() == 0 && !(beta_lo <= beta_hi)) throw Error(Errc::contract_violation, "empty loading range");
    }
}

IncrementPanel synth_iid(const SynthSpec& spec) {
    spec.validate();
    IncrementPanel p = empty_panel(spec);
    fill_noise(p, spec);
    return p;
}

Eigen::VectorXd planted_loadings(const SynthSpec& spec) {
    if (spec.loadings.size() != 0) return spec.loadings;
    CounterRng rng(derive_seed(spec.seed, 0, kTagLoadings));
    Eigen::VectorXd beta(spec.n_stocks);
    for (Index i = 0; i < spec.n_stocks; ++i) beta(i) = rng.uniform(spec.beta_lo, spec.beta_hi);
    return beta;
}

PlantedMarket planted_market(const SynthSpec& spec) {
    spec.validate();
    PlantedMarket out;
    out.panel = empty_panel(spec);
    fill_noise(out.panel, spec);
    out.loadings = planted_loadings(spec);

    CounterRng rng(derive_seed(spec.seed, 0, kTagCommon));
    double u = rng.normal() / std::sqrt(1.0 - spec.phi * spec.phi);
    for (Index t = 0; t < spec.length(); ++t) {
        if (t > 0) u = spec.phi * u + rng.normal();
        out.panel.values.col(t) += out.loadings * u;
    }
    const double norm = out.loadings.norm();
    out.direction = norm > 0.0 ? Eigen::VectorXd(out.loadings / norm) : Eigen::VectorXd::Zero(spec.n_stocks);
    return out;
}

Eigen::MatrixXd planted_population_lag1(const SynthSpec& spec) {
    const Eigen::VectorXd beta = planted_loadings(spec);
    const double var_u = 1.0 / (1.0 - spec.phi * spec.phi);
    const double lag1_u = spec.phi * var_u;
    const Eigen::VectorXd sd = (beta.array().square() * var_u + spec.noise_scale * spec.noise_scale).sqrt();
    const Eigen::VectorXd a = beta.cwiseQuotient(sd);
    return lag1_u * a * a.transpose();
}

Eigen::VectorXd planted_population_minimizer(const SynthSpec& spec) {
    if (!(spec.phi < 0.0)) {
        throw Error(Errc::contract_violation, "population minimiser is only unique for phi < 0");
    }
    const Eigen::VectorXd beta = planted_loadings(spec);
    const double var_u = 1.0 / (1.0 - spec.phi * spec.phi);
    Eigen::VectorXd a = beta.cwiseQuotient((beta.array().square() * var_u + spec.noise_scale * spec.noise_scale).sqrt().matrix());
    const double norm = a.norm();
    if (norm == 0.0) return a;
    a /= norm;
    fix_sign(a);
    return a;
}

double fgn_autocovariance(double H, Index k) {
    const double h2 = 2.0 * H;
    const double kk = static_cast<double>(k < 0 ? -k : k);
    return 0.5 * (std::pow(kk + 1.0, h2) - 2.0 * std::pow(kk, h2) + std::pow(std::abs(kk - 1.0), h2));
}

Eigen::VectorXd fgn(double H, Index n, std::uint64_t seed) {
    if (!(H > 0.0 && H < 1.0)) throw Error(Errc::contract_violation, "Hurst exponent must lie in (0, 1)");
    if (n < 2 || (n & (n - 1)) != 0) {
        throw Error(Errc::unsupported_size, "fgn length must be a power of two, got " + std::to_string(n));
    }
    const Index m = 2 * n;
    std::vector<std::complex<double>> c(static_cast<std::size_t>(m));
    for (Index j = 0; j <= n; ++j) c[static_cast<std::size_t>(j)] = fgn_autocovariance(H, j);
    for (Index j = 1; j < n; ++j) c[static_cast<std::size_t>(m - j)] = c[static_cast<std::size_t>(j)];

    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> lambda;
    fft.fwd(lambda, c);
    double peak = 0.0;
    for (const auto& l : lambda) peak = std::max(peak, l.real());
    for (auto& l : lambda) {
        if (l.real() < -1e-10 * peak) {
            throw Error(Errc::embedding_failure, "negative circulant eigenvalue for H=" + std::to_string(H) +
                                                     " n=" + std::to_string(n));
        }
    }

    CounterRng rng(derive_seed(seed, static_cast<std::uint64_t>(n), kTagFgn));
    std::vector<std::complex<double>> z(static_cast<std::size_t>(m));
    for (std::size_t j = 0; j < z.size(); ++j) {
        const double scale = std::sqrt(std::max(0.0, lambda[j].real()) / static_cast<double>(m));
        const double re = rng.normal();
        const double im = rng.normal();
        z[j] = scale * std::complex<double>(re, im);
    }
    std::vector<std::complex<double>> w;
    fft.fwd(w, z);
    Eigen::VectorXd out(n);
    for (Index t = 0; t < n; ++t) out(t) = w[static_cast<std::size_t>(t)].real();
    return out;
}

double NullDistribution::median_abs() const {
    if (rho_min.empty()) return std::nan("");
    std::vector<double> a(rho_min.size());
    std::transform(rho_min.begin(), rho_min.end(), a.begin(), [](double x) { return std::abs(x); });
    const std::size_t mid = a.size() / 2;
    std::nth_element(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(mid), a.end());
    if (a.size() % 2 == 1) return a[mid];
    const double upper = a[mid];
    const double lower = *std::max_element(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

double NullDistribution::fraction_abs_above(double threshold) const {
    if (rho_min.empty()) return std::nan("");
    const auto n = std::count_if(rho_min.begin(), rho_min.end(), [&](double x) { return std::abs(x) > threshold; });
    return static_cast<double>(n) / static_cast<double>(rho_min.size());
}

double null_run(Index n_stocks, Index length, std::uint64_t key) {
    SynthSpec spec;
    spec.n_stocks = n_stocks;
    spec.days = 1;
    spec.bars_per_day = length;
    spec.seed = key;
    const IncrementPanel raw = synth_iid(spec);
    const auto norm = normalize(raw.values, raw.symbols);
    const auto C = lagged_corr(norm.M, 1);
    const auto w = min_eigvec(C);
    return sample_autocorr(basket_series(w, raw.values), 1).rho;
}

std::vector<NullDistribution> null_min_autocorr(const NullSpec& spec) {
    if (spec.runs < 100) throw Error(Errc::contract_violation, "null experiment needs at least 100 runs");
    std::vector<NullDistribution> out;
    for (Index T : spec.lengths) {
        NullDistribution dist{T, std::vector<double>(static_cast<std::size_t>(spec.runs)), Histogram(spec.bin_width)};
        parallel_for(static_cast<std::size_t>(spec.runs), [&](std::size_t r) {
            const auto key = derive_seed(spec.seed, r, kTagNull + static_cast<std::uint64_t>(T));
            dist.rho_min[r] = null_run(spec.n_stocks, T, key);
        });
        dist.histogram.add_all(dist.rho_min);
        out.push_back(std::move(dist));
    }
    return out;
}

HurstNull hurst_null(const IncrementPanel& source, const HurstNullSpec& spec) {
    if (spec.runs < 100) throw Error(Errc::contract_violation, "Hurst null needs at least 100 runs");
    if (spec.days < 1 || source.n_days() < spec.days) {
        throw Error(Errc::insufficient_data, "source has " + std::to_string(source.n_days()) + " days, need " +
                                                 std::to_string(spec.days));
    }
    HurstNull out;
    out.histogram = Histogram(spec.bin_width);
    out.H.resize(static_cast<std::size_t>(spec.runs));
    const Index starts = source.n_days() - spec.days + 1;
    parallel_for(static_cast<std::size_t>(spec.runs), [&](std::size_t r) {
        CounterRng rng(derive_seed(spec.seed, r, kTagHurstNull));
        const Index start = std::min<Index>(starts - 1, static_cast<Index>(rng.uniform() * static_cast<double>(starts)));
        const Eigen::VectorXd w = rng.normal_vector(source.n_symbols()).normalized();
        const Index begin = source.day_begin(start);
        const Index end = source.day_end(start + spec.days - 1);
        const Eigen::VectorXd basket = source.values.middleCols(begin, end - begin).transpose() * w;
        out.H[r] = hurst_periodogram(basket).H;
    });
    out.histogram.add_all(out.H);
    double sum = 0.0;
    for (double h : out.H) sum += h;
    out.mean = sum / static_cast<double>(out.H.size());
    return out;
}

}  // namespace bm
