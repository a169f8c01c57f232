#pragma once

// Tick ingestion and fixed-clock bar sampling.
//
// Prices are held as integer multiples of 1e-6 currency units so that bar
// construction is exact; a midprice is stored doubled (bid + ask) to stay
// integral. Timestamps are integer milliseconds since midnight.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace bm {

using Eigen::Index;
using Millis = std::int64_t;
using PriceTicks = std::int64_t;

inline constexpr PriceTicks kTicksPerUnit = 1'000'000;
inline constexpr Millis kSessionStart = 36'000'000;  // 10:00:00
inline constexpr Millis kSessionEnd = 56'700'000;    // 15:45:00
inline constexpr int kSessionSeconds = 20'700;

struct TickRecord {
    int symbol = 0;
    Millis timestamp = 0;
    PriceTicks bid = 0;
    PriceTicks ask = 0;
    PriceTicks trade = 0;
};

struct TickDay {
    std::string date;
    std::vector<TickRecord> ticks;
};

struct Rejection {
    std::size_t line = 0;  // 1-based, header is line 1
    std::string reason;
};

struct ParseResult {
    std::vector<TickDay> days;  // ordered by first appearance in the stream
    std::size_t accepted = 0;
    std::vector<Rejection> rejects;
};

enum class DateColumn { automatic, required, absent };

struct ParseOptions {
    DateColumn date_column = DateColumn::automatic;
    std::string default_date = "day";  // used when the stream has no date column
};

/// Reads the tick CSV (`symbol,timestamp,bid,ask,trade` with an optional
/// `date` column). Malformed lines and lines failing the quote filters are
/// skipped and recorded in `rejects`.
[[nodiscard]] ParseResult parse_ticks(std::istream& in, const ParseOptions& opts = {});
[[nodiscard]] ParseResult parse_ticks(std::string_view text, const ParseOptions& opts = {});

/// Merges several parsed streams (e.g. one file per day) into day order.
void append_days(ParseResult& into, ParseResult&& from);

[[nodiscard]] std::optional<PriceTicks> parse_price(std::string_view s);
[[nodiscard]] std::optional<Millis> parse_timestamp(std::string_view s);
[[nodiscard]] std::string format_price(PriceTicks p);
[[nodiscard]] std::string format_timestamp(Millis t);

struct SessionSpec {
    std::string date;
    Millis start = kSessionStart;
    Millis end = kSessionEnd;
    int step_seconds = 5;

    [[nodiscard]] Index bars_per_day() const;  // increments per day
    [[nodiscard]] Millis grid_time(Index m) const { return start + static_cast<Millis>(m) * step_seconds * 1000; }
};

[[nodiscard]] Index bars_per_day(int step_seconds);

/// Midprices on the fixed clock; one N x (bars+1) grid per retained day.
struct BarPanel {
    std::vector<int> symbols;
    std::vector<std::string> days;
    int step_seconds = 5;
    std::vector<Eigen::Matrix<PriceTicks, Eigen::Dynamic, Eigen::Dynamic>> mid2;

    [[nodiscard]] Index n_symbols() const { return static_cast<Index>(symbols.size()); }
    [[nodiscard]] Index n_days() const { return static_cast<Index>(days.size()); }
    [[nodiscard]] Index bars_per_day() const { return mid2.empty() ? 0 : mid2.front().cols() - 1; }
    [[nodiscard]] double midprice(Index day, Index symbol, Index bar) const {
        return static_cast<double>(mid2[static_cast<std::size_t>(day)](symbol, bar)) / (2.0 * kTicksPerUnit);
    }
    [[nodiscard]] Eigen::MatrixXd day_midprices(Index day) const;
};

struct DroppedDay {
    std::string date;
    int symbol = 0;  // first symbol without an anchoring trade
};

struct SampleResult {
    BarPanel panel;
    std::vector<DroppedDay> dropped;
};

/// Samples one day: the midprice at grid time g is taken from the quotes of
/// the last trade at or before g. Returns nullopt (and sets `missing`) when
/// some symbol has no trade at or before the first grid time.
[[nodiscard]] std::optional<Eigen::Matrix<PriceTicks, Eigen::Dynamic, Eigen::Dynamic>> sample_day(
    std::span<const TickRecord> ticks, const SessionSpec& session, std::span<const int> symbols, int* missing = nullptr);

[[nodiscard]] SampleResult sample_bars(std::span<const TickDay> days, int step_seconds, std::span<const int> symbols);

/// Symbols present in any day, ascending.
[[nodiscard]] std::vector<int> collect_symbols(std::span<const TickDay> days);

/// Raw midprice differences, days concatenated in column order.
struct IncrementPanel {
    std::vector<int> symbols;
    std::vector<std::string> days;
    int step_seconds = 5;
    Eigen::MatrixXd values;              // N x T
    std::vector<Index> day_starts;       // column index of each day's first increment; day_starts[0] == 0

    [[nodiscard]] Index n_symbols() const { return values.rows(); }
    [[nodiscard]] Index n_days() const { return static_cast<Index>(day_starts.size()); }
    [[nodiscard]] Index length() const { return values.cols(); }
    [[nodiscard]] Index day_begin(Index d) const { return day_starts[static_cast<std::size_t>(d)]; }
    [[nodiscard]] Index day_end(Index d) const {
        return d + 1 < n_days() ? day_starts[static_cast<std::size_t>(d + 1)] : length();
    }

    /// Days [first, first+count) as a standalone panel with rebased day starts.
    [[nodiscard]] IncrementPanel slice_days(Index first, Index count) const;
};

[[nodiscard]] IncrementPanel increments(const BarPanel& panel);

/// Per-day cumulative sums anchored at each day's first midprice; inverse of `increments`.
[[nodiscard]] std::vector<Eigen::MatrixXd> integrate(const IncrementPanel& inc, const BarPanel& anchors);

/// Aggregates to a coarser clock whose step is a multiple of the panel's:
/// each coarse increment is the sum of step/base consecutive increments
/// inside a day, trailing residual discarded.
[[nodiscard]] IncrementPanel coarsen(const IncrementPanel& base, int step_seconds);

/// One synthetic tick per (symbol, grid time) whose quotes reproduce the panel.
[[nodiscard]] std::vector<TickDay> reconstruct_ticks(const BarPanel& panel);

/// Quantises price paths built from increments (each day anchored at
/// `base_price`) into a BarPanel on the standard session clock.
[[nodiscard]] BarPanel bars_from_increments(const IncrementPanel& inc, double base_price);

void write_ticks(std::ostream& out, std::span<const TickDay> days, bool with_date);

}  // namespace bm
