#pragma once

// Plain-text `key = value` run configuration. Later assignments win, so
// command-line overrides are applied after the file.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "basketminer/marketdata.hpp"
#include "basketminer/montecarlo.hpp"
#include "basketminer/pipeline.hpp"

namespace bm {

enum class DataSource { ticks, iid, planted };

struct RunConfig {
    // data
    DataSource source = DataSource::ticks;
    std::vector<std::string> inputs;
    DateColumn date_column = DateColumn::automatic;

    // synthetic market
    Index stocks = 30;
    Index synth_days = 30;
    double phi = -0.4;
    double beta_lo = 0.5;
    double beta_hi = 1.0;
    double noise = 1.0;
    double price_scale = 0.01;  // currency units per unit synthetic increment
    double base_price = 100.0;
    bool write_ticks = false;

    // procedure
    PipelineConfig pipeline;
    ReportConfig report;
    bool store_matrices = false;

    // Monte Carlo
    std::uint64_t seed = 1;
    Index runs = 2000;
    std::vector<Index> null_lengths{5000, 10000, 20000};

    // hurst subcommand
    std::vector<double> weights;

    std::filesystem::path out = "out";

    void validate() const;
};

/// Applies one assignment; throws Error(parse_error) on unknown keys or bad values.
void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value);
void apply_config_text(RunConfig& cfg, std::istream& in);
void load_config_file(RunConfig& cfg, const std::filesystem::path& path);

/// Every setting except `out`, one `key = value` per line, in a fixed order.
[[nodiscard]] std::string to_config_text(const RunConfig& cfg);

/// Finest step the requested scales can be aggregated from (gcd with 5 s).
[[nodiscard]] int base_step(const RunConfig& cfg);
[[nodiscard]] SynthSpec synth_spec(const RunConfig& cfg);

/// Integer list: "1,5" or an inclusive range "5:60:5".
[[nodiscard]] std::vector<long long> parse_int_list(std::string_view s);

}  // namespace bm
