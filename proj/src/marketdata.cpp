#include "basketminer/marketdata.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "basketminer/error.hpp"

namespace bm {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        const auto next = line.find(',', pos);
        out.push_back(trim(line.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos)));
        if (next == std::string_view::npos) break;
        pos = next + 1;
    }
    return out;
}

// Parses [+-]digits[.digits] with at most `max_frac` fractional digits,
// returning the value scaled by 10^max_frac.
std::optional<std::int64_t> parse_fixed(std::string_view s, int max_frac) {
    if (s.empty()) return std::nullopt;
    bool negative = false;
    if (s.front() == '-' || s.front() == '+') {
        negative = s.front() == '-';
        s.remove_prefix(1);
    }
    const auto dot = s.find('.');
    const std::string_view whole = s.substr(0, dot);
    const std::string_view frac = dot == std::string_view::npos ? std::string_view{} : s.substr(dot + 1);
    if (whole.empty() && frac.empty()) return std::nullopt;
    if (static_cast<int>(frac.size()) > max_frac) return std::nullopt;

    std::int64_t w = 0;
    if (!whole.empty()) {
        const auto [p, ec] = std::from_chars(whole.data(), whole.data() + whole.size(), w);
        if (ec != std::errc{} || p != whole.data() + whole.size()) return std::nullopt;
    }
    std::int64_t f = 0;
    for (char c : frac) {
        if (c < '0' || c > '9') return std::nullopt;
        f = f * 10 + (c - '0');
    }
    for (int i = static_cast<int>(frac.size()); i < max_frac; ++i) f *= 10;
    std::int64_t scale = 1;
    for (int i = 0; i < max_frac; ++i) scale *= 10;
    if (w > (INT64_MAX - f) / scale) return std::nullopt;
    const std::int64_t v = w * scale + f;
    return negative ? -v : v;
}

std::int64_t floor_half(std::int64_t v) { return v >= 0 ? v / 2 : -((-v + 1) / 2); }

}  // namespace

std::optional<PriceTicks> parse_price(std::string_view s) { return parse_fixed(s, 6); }

std::optional<Millis> parse_timestamp(std::string_view s) {
    auto v = parse_fixed(s, 3);
    if (!v || *v < 0) return std::nullopt;
    return v;
}

std::string format_price(PriceTicks p) {
    std::string sign = p < 0 ? "-" : "";
    const std::int64_t a = p < 0 ? -p : p;
    std::string frac = std::to_string(a % kTicksPerUnit);
    frac.insert(0, 6 - frac.size(), '0');
    while (frac.size() > 2 && frac.back() == '0') frac.pop_back();
    return sign + std::to_string(a / kTicksPerUnit) + "." + frac;
}

std::string format_timestamp(Millis t) {
    std::string frac = std::to_string(t % 1000);
    frac.insert(0, 3 - frac.size(), '0');
    return std::to_string(t / 1000) + "." + frac;
}

ParseResult parse_ticks(std::istream& in, const ParseOptions& opts) {
    ParseResult res;
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line)) return res;
    ++lineno;

    const auto header = split_csv(line);
    auto column = [&](std::string_view name) -> int {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return static_cast<int>(i);
        return -1;
    };
    const int c_sym = column("symbol"), c_ts = column("timestamp"), c_bid = column("bid"), c_ask = column("ask"),
              c_trade = column("trade");
    if (c_sym < 0 || c_ts < 0 || c_bid < 0 || c_ask < 0 || c_trade < 0) {
        throw Error(Errc::parse_error, "tick header must contain symbol,timestamp,bid,ask,trade; got '" + line + "'");
    }
    int c_date = opts.date_column == DateColumn::absent ? -1 : column("date");
    if (opts.date_column == DateColumn::required && c_date < 0) {
        throw Error(Errc::parse_error, "tick header has no date column");
    }
    const int needed = std::max({c_sym, c_ts, c_bid, c_ask, c_trade, c_date});

    std::unordered_map<std::string, std::size_t> day_index;
    std::map<std::pair<std::size_t, int>, Millis> last_ts;

    auto reject = [&](std::string reason) { res.rejects.push_back({lineno, std::move(reason)}); };

    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const auto f = split_csv(line);
        if (static_cast<int>(f.size()) <= needed) {
            reject("unparseable: too few fields");
            continue;
        }
        TickRecord r;
        const auto sym = f[static_cast<std::size_t>(c_sym)];
        const auto [p, ec] = std::from_chars(sym.data(), sym.data() + sym.size(), r.symbol);
        const auto ts = parse_timestamp(f[static_cast<std::size_t>(c_ts)]);
        const auto bid = parse_price(f[static_cast<std::size_t>(c_bid)]);
        const auto ask = parse_price(f[static_cast<std::size_t>(c_ask)]);
        const auto trade = parse_price(f[static_cast<std::size_t>(c_trade)]);
        if (ec != std::errc{} || p != sym.data() + sym.size() || !ts || !bid || !ask || !trade) {
            reject("unparseable");
            continue;
        }
        r.timestamp = *ts;
        r.bid = *bid;
        r.ask = *ask;
        r.trade = *trade;
        if (r.bid <= 0 || r.ask <= 0 || r.trade <= 0) {
            reject("nonpositive_price");
            continue;
        }
        if (r.bid > r.ask) {
            reject("crossed_quotes");
            continue;
        }

        std::string date = c_date >= 0 ? std::string(f[static_cast<std::size_t>(c_date)]) : opts.default_date;
        if (date.empty()) {
            reject("unparseable: empty date");
            continue;
        }
        auto [it, inserted] = day_index.try_emplace(date, res.days.size());
        if (inserted) res.days.push_back({date, {}});
        const std::size_t d = it->second;

        auto [lt, first] = last_ts.try_emplace({d, r.symbol}, r.timestamp);
        if (!first) {
            if (r.timestamp < lt->second) {
                reject("non_monotone_timestamp");
                continue;
            }
            lt->second = r.timestamp;
        }
        res.days[d].ticks.push_back(r);
        ++res.accepted;
    }
    return res;
}

ParseResult parse_ticks(std::string_view text, const ParseOptions& opts) {
    std::istringstream in{std::string(text)};
    return parse_ticks(in, opts);
}

void append_days(ParseResult& into, ParseResult&& from) {
    for (auto& d : from.days) {
        auto it = std::find_if(into.days.begin(), into.days.end(), [&](const TickDay& x) { return x.date == d.date; });
        if (it == into.days.end()) {
            into.days.push_back(std::move(d));
        } else {
            it->ticks.insert(it->ticks.end(), d.ticks.begin(), d.ticks.end());
        }
    }
    into.accepted += from.accepted;
    into.rejects.insert(into.rejects.end(), from.rejects.begin(), from.rejects.end());
}

Index bars_per_day(int step_seconds) {
    if (step_seconds < 1 || step_seconds > kSessionSeconds) {
        throw Error(Errc::contract_violation, "step must lie in [1, 20700] seconds, got " + std::to_string(step_seconds));
    }
    return kSessionSeconds / step_seconds;
}

Index SessionSpec::bars_per_day() const {
    if (step_seconds < 1) throw Error(Errc::contract_violation, "step must be positive");
    return static_cast<Index>((end - start) / (static_cast<Millis>(step_seconds) * 1000));
}

Eigen::MatrixXd BarPanel::day_midprices(Index day) const {
    return mid2[static_cast<std::size_t>(day)].cast<double>() / (2.0 * kTicksPerUnit);
}

std::optional<Eigen::Matrix<PriceTicks, Eigen::Dynamic, Eigen::Dynamic>> sample_day(std::span<const TickRecord> ticks,
                                                                                     const SessionSpec& session,
                                                                                     std::span<const int> symbols,
                                                                                     int* missing) {
    const Index bars = session.bars_per_day();
    std::unordered_map<int, std::size_t> row_of;
    for (std::size_t i = 0; i < symbols.size(); ++i) row_of.emplace(symbols[i], i);

    std::vector<std::vector<TickRecord>> per(symbols.size());
    for (const auto& t : ticks) {
        auto it = row_of.find(t.symbol);
        if (it != row_of.end()) per[it->second].push_back(t);
    }

    Eigen::Matrix<PriceTicks, Eigen::Dynamic, Eigen::Dynamic> grid(static_cast<Index>(symbols.size()), bars + 1);
    for (std::size_t i = 0; i < symbols.size(); ++i) {
        auto& ts = per[i];
        std::stable_sort(ts.begin(), ts.end(),
                         [](const TickRecord& a, const TickRecord& b) { return a.timestamp < b.timestamp; });
        std::ptrdiff_t last = -1;
        for (Index m = 0; m <= bars; ++m) {
            const Millis g = session.grid_time(m);
            while (last + 1 < static_cast<std::ptrdiff_t>(ts.size()) && ts[static_cast<std::size_t>(last + 1)].timestamp <= g)
                ++last;
            if (last < 0) {
                if (missing) *missing = symbols[i];
                return std::nullopt;
            }
            const auto& t = ts[static_cast<std::size_t>(last)];
            grid(static_cast<Index>(i), m) = t.bid + t.ask;
        }
    }
    return grid;
}

SampleResult sample_bars(std::span<const TickDay> days, int step_seconds, std::span<const int> symbols) {
    SampleResult res;
    res.panel.symbols.assign(symbols.begin(), symbols.end());
    res.panel.step_seconds = step_seconds;
    SessionSpec session;
    session.step_seconds = step_seconds;
    (void)bars_per_day(step_seconds);
    for (const auto& day : days) {
        session.date = day.date;
        int missing = 0;
        auto grid = sample_day(day.ticks, session, symbols, &missing);
        if (!grid) {
            res.dropped.push_back({day.date, missing});
            continue;
        }
        res.panel.days.push_back(day.date);
        res.panel.mid2.push_back(std::move(*grid));
    }
    return res;
}

std::vector<int> collect_symbols(std::span<const TickDay> days) {
    std::vector<int> out;
    for (const auto& d : days)
        for (const auto& t : d.ticks) out.push_back(t.symbol);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

IncrementPanel IncrementPanel::slice_days(Index first, Index count) const {
    if (first < 0 || count < 1 || first + count > n_days()) {
        throw Error(Errc::contract_violation, "day slice out of range");
    }
    IncrementPanel out;
    out.symbols = symbols;
    out.step_seconds = step_seconds;
    const Index begin = day_begin(first);
    const Index end = day_end(first + count - 1);
    out.values = values.middleCols(begin, end - begin);
    for (Index d = first; d < first + count; ++d) {
        out.day_starts.push_back(day_begin(d) - begin);
        if (static_cast<std::size_t>(d) < days.size()) out.days.push_back(days[static_cast<std::size_t>(d)]);
    }
    return out;
}

IncrementPanel increments(const BarPanel& panel) {
    if (panel.mid2.empty() || panel.symbols.empty()) throw Error(Errc::insufficient_data, "empty bar panel");
    const Index N = panel.n_symbols();
    const Index bars = panel.bars_per_day();
    IncrementPanel out;
    out.symbols = panel.symbols;
    out.days = panel.days;
    out.step_seconds = panel.step_seconds;
    out.values.resize(N, bars * panel.n_days());
    for (Index d = 0; d < panel.n_days(); ++d) {
        const auto& g = panel.mid2[static_cast<std::size_t>(d)];
        out.day_starts.push_back(d * bars);
        for (Index m = 0; m < bars; ++m)
            for (Index i = 0; i < N; ++i)
                out.values(i, d * bars + m) =
                    static_cast<double>(g(i, m + 1) - g(i, m)) / static_cast<double>(2 * kTicksPerUnit);
    }
    return out;
}

std::vector<Eigen::MatrixXd> integrate(const IncrementPanel& inc, const BarPanel& anchors) {
    if (anchors.n_days() != inc.n_days() || anchors.n_symbols() != inc.n_symbols()) {
        throw Error(Errc::contract_violation, "anchor panel does not match increment panel");
    }
    std::vector<Eigen::MatrixXd> out;
    for (Index d = 0; d < inc.n_days(); ++d) {
        const Index len = inc.day_end(d) - inc.day_begin(d);
        Eigen::MatrixXd mid(inc.n_symbols(), len + 1);
        for (Index i = 0; i < inc.n_symbols(); ++i) mid(i, 0) = anchors.midprice(d, i, 0);
        for (Index m = 0; m < len; ++m) mid.col(m + 1) = mid.col(m) + inc.values.col(inc.day_begin(d) + m);
        out.push_back(std::move(mid));
    }
    return out;
}

IncrementPanel coarsen(const IncrementPanel& base, int step_seconds) {
    if (step_seconds < base.step_seconds || step_seconds % base.step_seconds != 0) {
        throw Error(Errc::contract_violation, "step " + std::to_string(step_seconds) + " s is not a multiple of the base step " +
                                                  std::to_string(base.step_seconds) + " s");
    }
    const Index r = step_seconds / base.step_seconds;
    if (r == 1) return base;

    IncrementPanel out;
    out.symbols = base.symbols;
    out.days = base.days;
    out.step_seconds = step_seconds;
    Index total = 0;
    for (Index d = 0; d < base.n_days(); ++d) total += (base.day_end(d) - base.day_begin(d)) / r;
    out.values.resize(base.n_symbols(), total);
    Index col = 0;
    for (Index d = 0; d < base.n_days(); ++d) {
        out.day_starts.push_back(col);
        const Index groups = (base.day_end(d) - base.day_begin(d)) / r;
        for (Index g = 0; g < groups; ++g, ++col)
            out.values.col(col) = base.values.middleCols(base.day_begin(d) + g * r, r).rowwise().sum();
    }
    return out;
}

std::vector<TickDay> reconstruct_ticks(const BarPanel& panel) {
    std::vector<TickDay> out;
    SessionSpec session;
    session.step_seconds = panel.step_seconds;
    for (Index d = 0; d < panel.n_days(); ++d) {
        const auto& g = panel.mid2[static_cast<std::size_t>(d)];
        TickDay day{panel.days[static_cast<std::size_t>(d)], {}};
        day.ticks.reserve(static_cast<std::size_t>(g.size()));
        for (Index m = 0; m < g.cols(); ++m) {
            for (Index i = 0; i < g.rows(); ++i) {
                TickRecord t;
                t.symbol = panel.symbols[static_cast<std::size_t>(i)];
                t.timestamp = session.grid_time(m);
                t.bid = floor_half(g(i, m));
                t.ask = g(i, m) - t.bid;
                t.trade = t.bid;
                day.ticks.push_back(t);
            }
        }
        out.push_back(std::move(day));
    }
    return out;
}

BarPanel bars_from_increments(const IncrementPanel& inc, double base_price) {
    BarPanel out;
    out.symbols = inc.symbols;
    out.step_seconds = inc.step_seconds;
    const double scale = 2.0 * static_cast<double>(kTicksPerUnit);
    for (Index d = 0; d < inc.n_days(); ++d) {
        const Index len = inc.day_end(d) - inc.day_begin(d);
        Eigen::Matrix<PriceTicks, Eigen::Dynamic, Eigen::Dynamic> g(inc.n_symbols(), len + 1);
        for (Index i = 0; i < inc.n_symbols(); ++i) {
            double price = base_price;
            g(i, 0) = static_cast<PriceTicks>(std::llround(price * scale));
            for (Index m = 0; m < len; ++m) {
                price += inc.values(i, inc.day_begin(d) + m);
                g(i, m + 1) = static_cast<PriceTicks>(std::llround(price * scale));
                if (g(i, m + 1) <= 0) throw Error(Errc::contract_violation, "base price too low: path reached zero");
            }
        }
        out.days.push_back(static_cast<std::size_t>(d) < inc.days.size() ? inc.days[static_cast<std::size_t>(d)]
                                                                          : "day" + std::to_string(d));
        out.mid2.push_back(std::move(g));
    }
    return out;
}

void write_ticks(std::ostream& out, std::span<const TickDay> days, bool with_date) {
    out << (with_date ? "date,symbol,timestamp,bid,ask,trade\n" : "symbol,timestamp,bid,ask,trade\n");
    for (const auto& d : days) {
        for (const auto& t : d.ticks) {
            if (with_date) out << d.date << ',';
            out << t.symbol << ',' << format_timestamp(t.timestamp) << ',' << format_price(t.bid) << ','
                << format_price(t.ask) << ',' << format_price(t.trade) << '\n';
        }
    }
}

}  // namespace bm
