#include "basketminer/config.hpp"

#include <charconv>
#include <fstream>
#include <numeric>
#include <sstream>

#include "basketminer/error.hpp"

namespace bm {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value) {
    throw Error(Errc::parse_error, "invalid value '" + std::string(value) + "' for " + std::string(key));
}

long long to_int(std::string_view key, std::string_view v) {
    v = trim(v);
    long long out = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || p != v.data() + v.size()) bad_value(key, v);
    return out;
}

std::uint64_t to_u64(std::string_view key, std::string_view v) {
    v = trim(v);
    std::uint64_t out = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || p != v.data() + v.size()) bad_value(key, v);
    return out;
}

double to_double(std::string_view key, std::string_view v) {
    v = trim(v);
    double out = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || p != v.data() + v.size()) bad_value(key, v);
    return out;
}

bool to_bool(std::string_view key, std::string_view v) {
    v = trim(v);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    bad_value(key, v);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        const auto next = s.find(sep, pos);
        const auto piece = trim(s.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
        if (!piece.empty()) out.push_back(piece);
        if (next == std::string_view::npos) break;
        pos = next + 1;
    }
    return out;
}

template <typename T>
std::string join(const std::vector<T>& xs) {
    std::ostringstream o;
    for (std::size_t i = 0; i < xs.size(); ++i) o << (i ? "," : "") << xs[i];
    return o.str();
}

std::string join_doubles(const std::vector<double>& xs) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + format_double(xs[i]);
    return s;
}

std::string_view source_name(DataSource s) {
    switch (s) {
        case DataSource::ticks: return "ticks";
        case DataSource::iid: return "iid";
        case DataSource::planted: return "planted";
    }
    return "ticks";
}

std::string_view date_column_name(DateColumn d) {
    switch (d) {
        case DateColumn::automatic: return "auto";
        case DateColumn::required: return "required";
        case DateColumn::absent: return "absent";
    }
    return "auto";
}

}  // namespace

std::vector<long long> parse_int_list(std::string_view s) {
    std::vector<long long> out;
    for (auto item : split(s, ',')) {
        const auto parts = split(item, ':');
        if (parts.size() == 1) {
            out.push_back(to_int("list", parts[0]));
        } else if (parts.size() == 3) {
            const long long lo = to_int("list", parts[0]), hi = to_int("list", parts[1]), step = to_int("list", parts[2]);
            if (step <= 0) bad_value("list", item);
            for (long long v = lo; v <= hi; v += step) out.push_back(v);
        } else {
            bad_value("list", item);
        }
    }
    if (out.empty()) bad_value("list", s);
    return out;
}

void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value) {
    key = trim(key);
    value = trim(value);
    auto& p = cfg.pipeline;
    if (key == "source") {
        if (value == "ticks") cfg.source = DataSource::ticks;
        else if (value == "iid") cfg.source = DataSource::iid;
        else if (value == "planted") cfg.source = DataSource::planted;
        else bad_value(key, value);
    } else if (key == "input") {
        cfg.inputs.clear();
        for (auto v : split(value, ',')) cfg.inputs.emplace_back(v);
    } else if (key == "date_column") {
        if (value == "auto") cfg.date_column = DateColumn::automatic;
        else if (value == "required") cfg.date_column = DateColumn::required;
        else if (value == "absent") cfg.date_column = DateColumn::absent;
        else bad_value(key, value);
    } else if (key == "stocks") {
        cfg.stocks = to_int(key, value);
    } else if (key == "synth_days") {
        cfg.synth_days = to_int(key, value);
    } else if (key == "phi") {
        cfg.phi = to_double(key, value);
    } else if (key == "beta_lo") {
        cfg.beta_lo = to_double(key, value);
    } else if (key == "beta_hi") {
        cfg.beta_hi = to_double(key, value);
    } else if (key == "noise") {
        cfg.noise = to_double(key, value);
    } else if (key == "price_scale") {
        cfg.price_scale = to_double(key, value);
    } else if (key == "base_price") {
        cfg.base_price = to_double(key, value);
    } else if (key == "write_ticks") {
        cfg.write_ticks = to_bool(key, value);
    } else if (key == "days") {
        p.minimization_days = to_int(key, value);
    } else if (key == "test") {
        p.test_days.clear();
        for (auto v : parse_int_list(value)) p.test_days.push_back(v);
    } else if (key == "delta") {
        p.deltas.clear();
        for (auto v : parse_int_list(value)) p.deltas.push_back(static_cast<int>(v));
    } else if (key == "lag") {
        p.lag = to_int(key, value);
    } else if (key == "boundary") {
        p.boundary = parse_boundary_mode(value);
    } else if (key == "threads") {
        p.threads = static_cast<std::size_t>(to_int(key, value));
    } else if (key == "bin_corr") {
        cfg.report.corr_bin = to_double(key, value);
    } else if (key == "bin_weight") {
        cfg.report.weight_bin = to_double(key, value);
    } else if (key == "bin_hurst") {
        cfg.report.hurst_bin = to_double(key, value);
    } else if (key == "store_matrices") {
        cfg.store_matrices = to_bool(key, value);
    } else if (key == "seed") {
        cfg.seed = to_u64(key, value);
    } else if (key == "runs") {
        cfg.runs = to_int(key, value);
    } else if (key == "null_lengths") {
        cfg.null_lengths.clear();
        for (auto v : parse_int_list(value)) cfg.null_lengths.push_back(v);
    } else if (key == "weights") {
        cfg.weights.clear();
        for (auto v : split(value, ',')) cfg.weights.push_back(to_double(key, v));
    } else if (key == "out") {
        cfg.out = std::string(value);
    } else {
        throw Error(Errc::parse_error, "unknown config key '" + std::string(key) + "'");
    }
}

void apply_config_text(RunConfig& cfg, std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view s = trim(line);
        if (const auto hash = s.find('#'); hash != std::string_view::npos) s = trim(s.substr(0, hash));
        if (s.empty()) continue;
        const auto eq = s.find('=');
        if (eq == std::string_view::npos) {
            throw Error(Errc::parse_error, "config line " + std::to_string(lineno) + " is not key = value");
        }
        apply_setting(cfg, s.substr(0, eq), s.substr(eq + 1));
    }
}

void load_config_file(RunConfig& cfg, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::io_error, "cannot read config " + path.string());
    apply_config_text(cfg, in);
}

std::string to_config_text(const RunConfig& cfg) {
    const auto& p = cfg.pipeline;
    std::ostringstream o;
    o << "source = " << source_name(cfg.source) << '\n';
    o << "input = " << join(cfg.inputs) << '\n';
    o << "date_column = " << date_column_name(cfg.date_column) << '\n';
    o << "stocks = " << cfg.stocks << '\n';
    o << "synth_days = " << cfg.synth_days << '\n';
    o << "phi = " << format_double(cfg.phi) << '\n';
    o << "beta_lo = " << format_double(cfg.beta_lo) << '\n';
    o << "beta_hi = " << format_double(cfg.beta_hi) << '\n';
    o << "noise = " << format_double(cfg.noise) << '\n';
    o << "price_scale = " << format_double(cfg.price_scale) << '\n';
    o << "base_price = " << format_double(cfg.base_price) << '\n';
    o << "write_ticks = " << (cfg.write_ticks ? "true" : "false") << '\n';
    o << "days = " << p.minimization_days << '\n';
    o << "test = " << join(p.test_days) << '\n';
    o << "delta = " << join(p.deltas) << '\n';
    o << "lag = " << p.lag << '\n';
    o << "boundary = " << to_string(p.boundary) << '\n';
    o << "bin_corr = " << format_double(cfg.report.corr_bin) << '\n';
    o << "bin_weight = " << format_double(cfg.report.weight_bin) << '\n';
    o << "bin_hurst = " << format_double(cfg.report.hurst_bin) << '\n';
    o << "store_matrices = " << (cfg.store_matrices ? "true" : "false") << '\n';
    o << "seed = " << cfg.seed << '\n';
    o << "runs = " << cfg.runs << '\n';
    o << "null_lengths = " << join(cfg.null_lengths) << '\n';
    if (!cfg.weights.empty()) o << "weights = " << join_doubles(cfg.weights) << '\n';
    return o.str();
}

void RunConfig::validate() const {
    const auto& p = pipeline;
    if (p.minimization_days < 2) throw Error(Errc::contract_violation, "days (D) must be >= 2");
    if (p.lag < 1) throw Error(Errc::contract_violation, "lag must be >= 1");
    if (p.test_days.empty()) throw Error(Errc::contract_violation, "test list is empty");
    for (Index s : p.test_days)
        if (s < 1) throw Error(Errc::contract_violation, "test periods must be >= 1 day");
    if (p.deltas.empty()) throw Error(Errc::contract_violation, "delta list is empty");
    for (int d : p.deltas)
        if (d < 1 || d > kSessionSeconds) throw Error(Errc::contract_violation, "every delta must lie in [1, 20700]");
    if (stocks < 2) throw Error(Errc::contract_violation, "stocks must be >= 2");
    if (synth_days < 1) throw Error(Errc::contract_violation, "synth_days must be >= 1");
    if (!(noise > 0.0)) throw Error(Errc::contract_violation, "noise must be positive");
    if (!(report.corr_bin > 0 && report.weight_bin > 0 && report.hurst_bin > 0)) {
        throw Error(Errc::contract_violation, "bin widths must be positive");
    }
}

int base_step(const RunConfig& cfg) {
    int g = 5;
    for (int d : cfg.pipeline.deltas) g = std::gcd(g, d);
    return g;
}

SynthSpec synth_spec(const RunConfig& cfg) {
    SynthSpec s;
    s.n_stocks = cfg.stocks;
    s.days = cfg.synth_days;
    s.step_seconds = base_step(cfg);
    s.bars_per_day = bars_per_day(s.step_seconds);
    s.seed = cfg.seed;
    s.kind = cfg.source == DataSource::planted ? SynthKind::planted : SynthKind::iid;
    s.phi = cfg.phi;
    s.beta_lo = cfg.beta_lo;
    s.beta_hi = cfg.beta_hi;
    s.noise_scale = cfg.noise;
    return s;
}

}  // namespace bm
