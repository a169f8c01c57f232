#include "basketminer/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "basketminer/error.hpp"
#include "basketminer/parallel.hpp"

namespace bm {

std::string_view to_string(BoundaryMode m) noexcept { return m == BoundaryMode::skip ? "skip" : "concat"; }

BoundaryMode parse_boundary_mode(std::string_view s) {
    if (s == "skip") return BoundaryMode::skip;
    if (s == "concat") return BoundaryMode::concat;
    throw Error(Errc::parse_error, "boundary mode must be skip or concat, got '" + std::string(s) + "'");
}

std::vector<int> default_deltas() {
    std::vector<int> d;
    for (int s = 5; s <= 60; s += 5) d.push_back(s);
    return d;
}

const TestResult* WindowResult::test(Index S) const {
    for (const auto& t : tests)
        if (t.days == S) return &t;
    return nullptr;
}

namespace {

std::span<const Index> starts_for(const IncrementPanel& p, BoundaryMode mode) {
    if (mode == BoundaryMode::concat) return {};
    return p.day_starts;
}

std::optional<HurstEstimate<double>> try_hurst(const Eigen::VectorXd& series) {
    if (series.size() < 256) return std::nullopt;
    try {
        return hurst_periodogram(series);
    } catch (const Error&) {
        return std::nullopt;
    }
}

std::vector<Index> sorted_tests(std::span<const Index> s) {
    std::vector<Index> v(s.begin(), s.end());
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

}  // namespace

WindowResult run_window(const IncrementPanel& panel, const IncrementPanel& hurst_panel, Index start_day,
                        const PipelineConfig& config) {
    const Index D = config.minimization_days;
    if (D < 2) throw Error(Errc::contract_violation, "minimisation period must span at least 2 days");
    const auto tests = sorted_tests(config.test_days);
    if (tests.empty() || tests.front() < 1) throw Error(Errc::contract_violation, "test periods must be >= 1 day");
    if (start_day < 0 || start_day + D + tests.front() > panel.n_days()) {
        throw Error(Errc::insufficient_data, "window starting at day " + std::to_string(start_day) + " runs past the data");
    }

    WindowResult r;
    r.delta = panel.step_seconds;
    r.start_day = start_day;
    r.symbols = panel.symbols;
    const IncrementPanel in = panel.slice_days(start_day, D);
    r.minimization_days = in.days;

    try {
        const auto norm = normalize(in.values, in.symbols);
        const auto C = lagged_corr(norm.M, config.lag, starts_for(in, config.boundary));
        r.weights = min_eigvec(C);
        r.lambda_min = r.weights.lambda_min;
        r.c_hat = C.c_hat;

        const Eigen::VectorXd basket = basket_series(r.weights, in.values);
        r.n_min = basket.size();
        r.rho_min = sample_autocorr(basket, config.lag, starts_for(in, config.boundary)).rho;
        r.rho_min_concat = sample_autocorr(basket, config.lag).rho;

        if (hurst_panel.n_days() == panel.n_days()) {
            const IncrementPanel h = hurst_panel.slice_days(start_day, D);
            r.hurst = try_hurst(basket_series(r.weights, h.values));
        }

        for (Index S : tests) {
            if (start_day + D + S > panel.n_days()) {
                r.missing_tests.push_back(S);
                continue;
            }
            const IncrementPanel out = panel.slice_days(start_day + D, S);
            const Eigen::VectorXd b = basket_series(r.weights, out.values);
            TestResult t;
            t.days = S;
            t.dates = out.days;
            t.n = b.size();
            t.rho = sample_autocorr(b, config.lag, starts_for(out, config.boundary)).rho;
            t.rho_concat = sample_autocorr(b, config.lag).rho;
            t.ci = ci_halfwidth(t.n);
            t.significant = t.rho < -t.ci;
            if (hurst_panel.n_days() == panel.n_days()) {
                const IncrementPanel h = hurst_panel.slice_days(start_day + D, S);
                t.hurst = try_hurst(basket_series(r.weights, h.values));
            }
            r.tests.push_back(std::move(t));
        }
    } catch (const Error& e) {
        if (e.code() != Errc::degenerate_stock && e.code() != Errc::degenerate_series &&
            e.code() != Errc::insufficient_data) {
            throw;
        }
        r.status = WindowStatus::skipped;
        r.skip_reason = e.what();
        r.tests.clear();
        r.hurst.reset();
    }
    return r;
}

Index window_count(Index n_days, Index minimization_days, std::span<const Index> test_days) {
    if (test_days.empty()) return 0;
    const Index shortest = *std::min_element(test_days.begin(), test_days.end());
    return std::max<Index>(0, n_days - minimization_days - shortest + 1);
}

std::vector<WindowResult> run_rolling(const IncrementPanel& base, const PipelineConfig& config) {
    const Index windows = window_count(base.n_days(), config.minimization_days, config.test_days);
    if (windows < 1) {
        throw Error(Errc::insufficient_data, std::to_string(base.n_days()) + " days cannot fit D=" +
                                                 std::to_string(config.minimization_days) + " plus a test period");
    }
    std::vector<IncrementPanel> panels;
    for (int delta : config.deltas) panels.push_back(coarsen(base, delta));

    std::vector<WindowResult> results(panels.size() * static_cast<std::size_t>(windows));
    parallel_for(
        results.size(),
        [&](std::size_t job) {
            const std::size_t scale = job / static_cast<std::size_t>(windows);
            const Index w = static_cast<Index>(job % static_cast<std::size_t>(windows));
            results[job] = run_window(panels[scale], base, w, config);
            results[job].window_index = w;
        },
        config.threads == 0 ? thread_count() : config.threads);
    return results;
}

RunReport aggregate(std::span<const WindowResult> results, const ReportConfig& config) {
    if (results.empty()) throw Error(Errc::insufficient_data, "no window results to aggregate");
    std::map<int, ScaleSummary> by_delta;
    std::map<int, double> hurst_sum, rho_sum;
    std::map<int, Index> hurst_n;
    std::map<std::pair<int, Index>, double> test_sum;
    std::map<std::pair<int, Index>, Index> test_sig;

    for (const auto& r : results) {
        auto [it, inserted] = by_delta.try_emplace(r.delta);
        ScaleSummary& s = it->second;
        if (inserted) {
            s.delta = r.delta;
            s.rho_min = Histogram(config.corr_bin);
            s.hurst = Histogram(config.hurst_bin);
            s.weights = Histogram(config.weight_bin);
            s.c_hat = Histogram(config.corr_bin);
        }
        if (r.status != WindowStatus::ok) {
            ++s.skipped;
            continue;
        }
        ++s.windows;
        s.rho_min.add(r.rho_min);
        rho_sum[r.delta] += r.rho_min;
        if (r.hurst) {
            s.hurst.add(r.hurst->H);
            hurst_sum[r.delta] += r.hurst->H;
            ++hurst_n[r.delta];
        }
        s.weights.add_all(r.weights.e);
        s.c_hat.add_all(r.c_hat.reshaped());
        for (const auto& t : r.tests) {
            auto [ti, fresh] = s.tests.try_emplace(t.days);
            if (fresh) ti->second.rho = Histogram(config.corr_bin);
            ++ti->second.count;
            ti->second.rho.add(t.rho);
            test_sum[{r.delta, t.days}] += t.rho;
            if (t.significant) ++test_sig[{r.delta, t.days}];
        }
    }

    const double nan = std::nan("");
    RunReport report;
    for (auto& [delta, s] : by_delta) {
        s.mean_rho_min = s.windows > 0 ? rho_sum[delta] / static_cast<double>(s.windows) : nan;
        s.mean_hurst = hurst_n[delta] > 0 ? hurst_sum[delta] / static_cast<double>(hurst_n[delta]) : nan;
        for (auto& [S, t] : s.tests) {
            t.mean_rho = test_sum[{delta, S}] / static_cast<double>(t.count);
            t.frac_significant = static_cast<double>(test_sig[{delta, S}]) / static_cast<double>(t.count);
        }
        report.scales.push_back(std::move(s));
    }
    return report;
}

void write_summary_csv(std::ostream& out, const RunReport& report) {
    const double nan = std::nan("");
    out << "delta,mean_rho_min,mean_rho_s1,mean_rho_s5,frac_sig_s1,frac_sig_s5,mean_hurst\n";
    for (const auto& s : report.scales) {
        auto field = [&](Index S, bool frac) {
            const auto it = s.tests.find(S);
            if (it == s.tests.end()) return nan;
            return frac ? it->second.frac_significant : it->second.mean_rho;
        };
        out << s.delta << ',' << format_double(s.mean_rho_min) << ',' << format_double(field(1, false)) << ','
            << format_double(field(5, false)) << ',' << format_double(field(1, true)) << ','
            << format_double(field(5, true)) << ',' << format_double(s.mean_hurst) << '\n';
    }
}

void write_report(const RunReport& report, const std::filesystem::path& dir) {
    {
        auto out = open_output(dir / "summary.csv");
        write_summary_csv(out, report);
    }
    for (const auto& s : report.scales) {
        const std::string suffix = "_d" + std::to_string(s.delta) + ".csv";
        write_histogram_csv(dir / ("hist_rho_min" + suffix), s.rho_min);
        for (const auto& [S, t] : s.tests) write_histogram_csv(dir / ("hist_rho_s" + std::to_string(S) + suffix), t.rho);
        write_histogram_csv(dir / ("hist_hurst" + suffix), s.hurst);
        write_histogram_csv(dir / ("hist_weights" + suffix), s.weights);
        if (s.c_hat.total() > 0) write_histogram_csv(dir / ("hist_chat" + suffix), s.c_hat);
    }
}

}  // namespace bm
