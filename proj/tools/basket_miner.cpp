// basket_miner: command-line front end.
//
//   basket_miner synth  --set source=planted --out data/
//   basket_miner sample --input ticks.csv --delta 5,35 --out bars/
//   basket_miner mine   --input ticks.csv --days 10 --test 1,5 --out run/
//   basket_miner null   --runs 2000 --out null/
//   basket_miner hurst  --input ticks.csv --out hurst/
//   basket_miner report --results run/results.jsonl --out run/

#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "basketminer/error.hpp"
#include "commands.hpp"

namespace {

struct Flags {
    std::optional<std::string> config;
    std::optional<std::string> seed;
    std::optional<std::string> delta;
    std::optional<std::string> days;
    std::optional<std::string> test;
    std::optional<std::string> out;
    std::optional<std::string> boundary;
    std::optional<std::string> runs;
    std::optional<std::string> source;
    std::vector<std::string> inputs;
    std::vector<std::string> settings;
    std::string results;
};

void add_common(CLI::App* cmd, Flags& f) {
    cmd->add_option("--config", f.config, "key = value config file");
    cmd->add_option("--seed", f.seed, "root seed (u64)");
    cmd->add_option("--delta", f.delta, "time steps in seconds, e.g. 5,10 or 5:60:5");
    cmd->add_option("--days", f.days, "minimisation period D in days");
    cmd->add_option("--test", f.test, "test periods S in days, e.g. 1,5");
    cmd->add_option("--out", f.out, "output directory");
    cmd->add_option("--boundary", f.boundary, "day-boundary handling: skip|concat");
    cmd->add_option("--runs", f.runs, "Monte Carlo runs");
    cmd->add_option("--source", f.source, "data source: ticks|iid|planted");
    cmd->add_option("--input", f.inputs, "tick CSV file(s)");
    cmd->add_option("--set", f.settings, "override any config key: key=value");
}

bm::RunConfig resolve(const Flags& f) {
    bm::RunConfig cfg;
    if (f.config) bm::load_config_file(cfg, *f.config);
    for (const auto& s : f.settings) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw bm::Error(bm::Errc::parse_error, "--set expects key=value, got '" + s + "'");
        bm::apply_setting(cfg, s.substr(0, eq), s.substr(eq + 1));
    }
    const std::pair<const char*, const std::optional<std::string>*> named[] = {
        {"seed", &f.seed}, {"delta", &f.delta}, {"days", &f.days},     {"test", &f.test},
        {"out", &f.out},   {"boundary", &f.boundary}, {"runs", &f.runs}, {"source", &f.source},
    };
    for (const auto& [key, value] : named)
        if (*value) bm::apply_setting(cfg, key, **value);
    if (!f.inputs.empty()) {
        cfg.inputs = f.inputs;
        if (!f.source) cfg.source = bm::DataSource::ticks;
    }
    cfg.validate();
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Minimum-autocorrelation basket search on high-frequency midprices"};
    app.require_subcommand(1);
    Flags flags;

    auto* synth = app.add_subcommand("synth", "write a synthetic IID or planted market");
    auto* sample = app.add_subcommand("sample", "sample tick CSVs onto fixed-step midprice bars");
    auto* mine = app.add_subcommand("mine", "rolling minimisation and out-of-sample test");
    auto* null = app.add_subcommand("null", "null distributions of the minimised autocorrelation and of H");
    auto* hurst = app.add_subcommand("hurst", "periodogram Hurst exponent per symbol (and of a weighted basket)");
    auto* report = app.add_subcommand("report", "re-aggregate a results.jsonl file");
    for (auto* cmd : {synth, sample, mine, null, hurst, report}) add_common(cmd, flags);
    report->add_option("--results", flags.results, "results.jsonl from a mine run")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        const bm::RunConfig cfg = resolve(flags);
        if (synth->parsed()) return bm::cli::cmd_synth(cfg);
        if (sample->parsed()) return bm::cli::cmd_sample(cfg);
        if (mine->parsed()) return bm::cli::cmd_mine(cfg);
        if (null->parsed()) return bm::cli::cmd_null(cfg);
        if (hurst->parsed()) return bm::cli::cmd_hurst(cfg);
        if (report->parsed()) return bm::cli::cmd_report(cfg, flags.results);
    } catch (const bm::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.code() == bm::Errc::insufficient_data ? bm::cli::kExitInsufficientData : bm::cli::kExitError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return bm::cli::kExitError;
    }
    return bm::cli::kExitError;
}
