#include "commands.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>

#include "basketminer/error.hpp"
#include "basketminer/montecarlo.hpp"
#include "basketminer/pipeline.hpp"
#include "basketminer/report.hpp"

namespace bm::cli {

namespace {

namespace fs = std::filesystem;

struct LoadedTicks {
    ParseResult parsed;
    std::vector<std::string> files;  // per rejection
};

LoadedTicks load_ticks(const RunConfig& cfg) {
    if (cfg.inputs.empty()) throw Error(Errc::contract_violation, "no tick input given (use --input or source = iid|planted)");
    LoadedTicks out;
    for (const auto& path : cfg.inputs) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw Error(Errc::io_error, "cannot read " + path);
        ParseOptions opts;
        opts.date_column = cfg.date_column;
        opts.default_date = fs::path(path).stem().string();
        ParseResult r = parse_ticks(in, opts);
        out.files.insert(out.files.end(), r.rejects.size(), path);
        append_days(out.parsed, std::move(r));
    }
    return out;
}

void write_rejects(const fs::path& dir, const LoadedTicks& t) {
    auto out = open_output(dir / "rejects.csv");
    out << "file,line,reason\n";
    for (std::size_t i = 0; i < t.parsed.rejects.size(); ++i)
        out << t.files[i] << ',' << t.parsed.rejects[i].line << ',' << t.parsed.rejects[i].reason << '\n';
}

void write_config(const RunConfig& cfg) {
    auto out = open_output(cfg.out / "config.txt");
    out << to_config_text(cfg);
}

IncrementPanel load_panel(const RunConfig& cfg) {
    if (cfg.source == DataSource::iid) return synth_iid(synth_spec(cfg));
    if (cfg.source == DataSource::planted) return planted_market(synth_spec(cfg)).panel;

    const auto ticks = load_ticks(cfg);
    write_rejects(cfg.out, ticks);
    const auto symbols = collect_symbols(ticks.parsed.days);
    auto sampled = sample_bars(ticks.parsed.days, base_step(cfg), symbols);
    {
        auto out = open_output(cfg.out / "dropped_days.csv");
        out << "date,symbol,delta\n";
        for (const auto& d : sampled.dropped) out << d.date << ',' << d.symbol << ',' << base_step(cfg) << '\n';
    }
    if (!sampled.dropped.empty()) std::cerr << sampled.dropped.size() << " day(s) dropped for missing opening trades\n";
    if (sampled.panel.n_days() == 0 || symbols.size() < 2) {
        throw Error(Errc::insufficient_data, "tick data yields no complete day with at least two symbols");
    }
    return increments(sampled.panel);
}

void write_column(const fs::path& path, const char* header, const Eigen::Ref<const Eigen::VectorXd>& v) {
    auto out = open_output(path);
    out << header << '\n';
    for (Index t = 0; t < v.size(); ++t) out << format_double(v(t)) << '\n';
}

}  // namespace

int cmd_synth(const RunConfig& cfg) {
    if (cfg.source == DataSource::ticks) throw Error(Errc::contract_violation, "synth needs source = iid or planted");
    const SynthSpec spec = synth_spec(cfg);
    IncrementPanel panel;
    if (spec.kind == SynthKind::planted) {
        const auto planted = planted_market(spec);
        panel = planted.panel;
        auto out = open_output(cfg.out / "ground_truth.csv");
        const bool unique = spec.phi < 0.0;
        const Eigen::VectorXd minimizer = unique ? planted_population_minimizer(spec) : Eigen::VectorXd();
        out << "symbol,loading,direction" << (unique ? ",population_minimizer" : "") << '\n';
        for (Index i = 0; i < spec.n_stocks; ++i) {
            out << panel.symbols[static_cast<std::size_t>(i)] << ',' << format_double(planted.loadings(i)) << ','
                << format_double(planted.direction(i));
            if (unique) out << ',' << format_double(minimizer(i));
            out << '\n';
        }
    } else {
        panel = synth_iid(spec);
    }

    for (Index i = 0; i < panel.n_symbols(); ++i) {
        write_column(cfg.out / "increments" / ("stock_" + std::to_string(panel.symbols[static_cast<std::size_t>(i)]) + ".csv"),
                     "increment", panel.values.row(i).transpose());
    }
    if (cfg.write_ticks) {
        IncrementPanel scaled = panel;
        scaled.values *= cfg.price_scale;
        const auto ticks = reconstruct_ticks(bars_from_increments(scaled, cfg.base_price));
        auto out = open_output(cfg.out / "ticks.csv");
        write_ticks(out, ticks, true);
    }
    write_config(cfg);
    std::cout << "wrote " << panel.n_symbols() << " series of " << panel.length() << " increments to " << cfg.out.string()
              << '\n';
    return kExitOk;
}

int cmd_sample(const RunConfig& cfg) {
    const auto ticks = load_ticks(cfg);
    write_rejects(cfg.out, ticks);
    const auto symbols = collect_symbols(ticks.parsed.days);
    auto dropped = open_output(cfg.out / "dropped_days.csv");
    dropped << "date,symbol,delta\n";
    for (int delta : cfg.pipeline.deltas) {
        const auto sampled = sample_bars(ticks.parsed.days, delta, symbols);
        for (const auto& d : sampled.dropped) dropped << d.date << ',' << d.symbol << ',' << delta << '\n';
        const std::string suffix = "_d" + std::to_string(delta) + ".csv";

        auto bars = open_output(cfg.out / ("bars" + suffix));
        auto incs = open_output(cfg.out / ("increments" + suffix));
        bars << "date,bar,timestamp";
        incs << "date,bar";
        for (int s : symbols) {
            bars << ',' << s;
            incs << ',' << s;
        }
        bars << '\n';
        incs << '\n';
        SessionSpec session;
        session.step_seconds = delta;
        const BarPanel& p = sampled.panel;
        for (Index d = 0; d < p.n_days(); ++d) {
            const auto mid = p.day_midprices(d);
            for (Index m = 0; m < mid.cols(); ++m) {
                bars << p.days[static_cast<std::size_t>(d)] << ',' << m << ',' << format_timestamp(session.grid_time(m));
                for (Index i = 0; i < mid.rows(); ++i) bars << ',' << format_double(mid(i, m));
                bars << '\n';
            }
        }
        Index per_day = 0;
        if (p.n_days() > 0) {
            const auto inc = increments(p);
            per_day = inc.day_end(0) - inc.day_begin(0);
            for (Index d = 0; d < inc.n_days(); ++d) {
                for (Index t = inc.day_begin(d); t < inc.day_end(d); ++t) {
                    incs << inc.days[static_cast<std::size_t>(d)] << ',' << t - inc.day_begin(d);
                    for (Index i = 0; i < inc.n_symbols(); ++i) incs << ',' << format_double(inc.values(i, t));
                    incs << '\n';
                }
            }
        }
        std::cout << "delta=" << delta << " days=" << p.n_days() << " dropped=" << sampled.dropped.size()
                  << " increments_per_day=" << per_day << '\n';
    }
    std::cout << "accepted=" << ticks.parsed.accepted << " rejected=" << ticks.parsed.rejects.size() << '\n';
    return kExitOk;
}

int cmd_mine(const RunConfig& cfg) {
    const IncrementPanel base = load_panel(cfg);
    const auto results = run_rolling(base, cfg.pipeline);
    {
        auto out = open_output(cfg.out / "results.jsonl");
        write_results_jsonl(out, results, cfg.store_matrices);
    }
    const RunReport report = aggregate(results, cfg.report);
    write_report(report, cfg.out);
    write_config(cfg);
    const auto skipped = std::count_if(results.begin(), results.end(),
                                       [](const WindowResult& r) { return r.status != WindowStatus::ok; });
    std::cout << results.size() << " windows (" << skipped << " skipped) over " << base.n_days() << " days, "
              << cfg.pipeline.deltas.size() << " time scales\n";
    write_summary_csv(std::cout, report);
    return kExitOk;
}

int cmd_null(const RunConfig& cfg) {
    NullSpec spec;
    spec.lengths = cfg.null_lengths;
    spec.runs = cfg.runs;
    spec.n_stocks = cfg.stocks;
    spec.seed = cfg.seed;
    spec.bin_width = cfg.report.corr_bin;
    const auto dists = null_min_autocorr(spec);
    {
        auto summary = open_output(cfg.out / "null_summary.csv");
        summary << "T,runs,median_abs_rho_min,frac_abs_above_0.12\n";
        for (const auto& d : dists) {
            write_histogram_csv(cfg.out / ("null_T" + std::to_string(d.length) + ".csv"), d.histogram);
            summary << d.length << ',' << d.rho_min.size() << ',' << format_double(d.median_abs()) << ','
                    << format_double(d.fraction_abs_above(0.12)) << '\n';
            std::cout << "T=" << d.length << " median|rho_min|=" << format_double(d.median_abs())
                      << " frac(|rho_min|>0.12)=" << format_double(d.fraction_abs_above(0.12)) << '\n';
        }
    }

    HurstNullSpec hspec;
    hspec.runs = cfg.runs;
    hspec.days = cfg.pipeline.minimization_days;
    hspec.seed = cfg.seed;
    hspec.bin_width = cfg.report.hurst_bin;
    IncrementPanel source;
    if (cfg.source == DataSource::ticks && !cfg.inputs.empty()) {
        source = load_panel(cfg);
    } else {
        RunConfig iid = cfg;
        iid.source = DataSource::iid;
        iid.synth_days = std::max(cfg.synth_days, cfg.pipeline.minimization_days);
        SynthSpec s = synth_spec(iid);
        s.step_seconds = 5;
        s.bars_per_day = bars_per_day(5);
        source = synth_iid(s);
    }
    const auto hn = hurst_null(source, hspec);
    write_histogram_csv(cfg.out / "hurst_null.csv", hn.histogram);
    {
        auto out = open_output(cfg.out / "hurst_null_summary.csv");
        out << "runs,days,mean_H\n" << hn.H.size() << ',' << hspec.days << ',' << format_double(hn.mean) << '\n';
    }
    std::cout << "hurst null mean H=" << format_double(hn.mean) << " over " << hn.H.size() << " baskets\n";
    write_config(cfg);
    return kExitOk;
}

int cmd_hurst(const RunConfig& cfg) {
    const IncrementPanel base = load_panel(cfg);
    auto out = open_output(cfg.out / "hurst.csv");
    out << "series,H,slope,n_frequencies\n";
    auto emit = [&](const std::string& name, const Eigen::VectorXd& y) {
        const auto h = hurst_periodogram(y);
        out << name << ',' << format_double(h.H) << ',' << format_double(h.slope) << ',' << h.n_frequencies_used << '\n';
        std::cout << name << " H=" << format_double(h.H) << '\n';
    };
    for (Index i = 0; i < base.n_symbols(); ++i)
        emit(std::to_string(base.symbols[static_cast<std::size_t>(i)]), base.values.row(i).transpose());
    if (!cfg.weights.empty()) {
        if (static_cast<Index>(cfg.weights.size()) != base.n_symbols()) {
            throw Error(Errc::contract_violation, "weights list must have one entry per symbol");
        }
        const Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(cfg.weights.data(), base.n_symbols());
        emit("basket", base.values.transpose() * w);
    }
    write_config(cfg);
    return kExitOk;
}

int cmd_report(const RunConfig& cfg, const std::filesystem::path& results) {
    std::ifstream in(results, std::ios::binary);
    if (!in) throw Error(Errc::io_error, "cannot read " + results.string());
    const auto windows = read_results_jsonl(in);
    const RunReport report = aggregate(windows, cfg.report);
    write_report(report, cfg.out);
    write_summary_csv(std::cout, report);
    return kExitOk;
}

}  // namespace bm::cli
