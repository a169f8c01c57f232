#include <doctest.h>

#include <sstream>
#include <string>
#include <vector>

#include "basketminer/error.hpp"
#include "basketminer/marketdata.hpp"
#include "basketminer/montecarlo.hpp"

using namespace bm;

namespace {

constexpr const char* kHeader = "symbol,timestamp,bid,ask,trade\n";

TickRecord tick(int symbol, Millis t, PriceTicks bid, PriceTicks ask) { return {symbol, t, bid, ask, bid}; }

PriceTicks cents(long long c) { return c * 10'000; }

}  // namespace

TEST_CASE("parse_ticks maps fields exactly") {
    const auto r = parse_ticks(std::string(kHeader) + "1,36000.500,10.00,10.02,10.01\n");
    REQUIRE(r.days.size() == 1);
    REQUIRE(r.days[0].ticks.size() == 1);
    const auto& t = r.days[0].ticks[0];
    CHECK(t.symbol == 1);
    CHECK(t.timestamp == 36'000'500);
    CHECK(t.bid == 10'000'000);
    CHECK(t.ask == 10'020'000);
    CHECK(t.trade == 10'010'000);
    CHECK(r.accepted == 1);
    CHECK(r.rejects.empty());
    CHECK(r.days[0].date == "day");
}

TEST_CASE("parse_ticks filters bad lines") {
    const std::string text = std::string(kHeader) +
                             "1,36000.0,10.05,10.02,10.03\n"   // crossed
                             "1,36010.0,10.00,10.02,10.01\n"
                             "1,36005.0,10.00,10.02,10.01\n"   // goes back in time
                             "2,36005.0,10.00,10.02,10.01\n"   // other symbol is independent
                             "2,36006.0,0,10.02,10.01\n"       // nonpositive
                             "x,36007.0,10.00,10.02\n"         // short
                             "\n"
                             "2,abc,10.00,10.02,10.01\n";
    const auto r = parse_ticks(text);
    CHECK(r.accepted == 2);
    REQUIRE(r.rejects.size() == 5);
    CHECK(r.rejects[0].line == 2);
    CHECK(r.rejects[0].reason == "crossed_quotes");
    CHECK(r.rejects[1].line == 4);
    CHECK(r.rejects[1].reason == "non_monotone_timestamp");
    CHECK(r.rejects[2].reason == "nonpositive_price");
    CHECK(r.rejects[3].reason.rfind("unparseable", 0) == 0);
    CHECK(r.rejects[4].line == 9);
}

TEST_CASE("parse_ticks header handling and dates") {
    CHECK(parse_ticks(kHeader).days.empty());
    try {
        (void)parse_ticks("symbol,timestamp,bid\n1,2,3\n");
        FAIL("expected parse error");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::parse_error);
    }
    const auto r = parse_ticks(
        "date,symbol,timestamp,bid,ask,trade\n"
        "2007-01-03,1,36000.0,10.00,10.02,10.01\n"
        "2007-01-03,1,36001.0,10.00,10.02,10.01\n"
        "2007-01-04,1,35000.0,10.00,10.02,10.01\n");
    REQUIRE(r.days.size() == 2);
    CHECK(r.days[0].date == "2007-01-03");
    CHECK(r.days[1].date == "2007-01-04");
    CHECK(r.days[1].ticks.size() == 1);  // monotonicity restarts each day
    CHECK(r.rejects.empty());

    ParseOptions need;
    need.date_column = DateColumn::required;
    CHECK_THROWS_AS((void)parse_ticks(kHeader, need), Error);
}

TEST_CASE("price and timestamp text round trip") {
    CHECK(parse_price("10.02") == 10'020'000);
    CHECK(parse_price("7") == 7'000'000);
    CHECK(!parse_price("1.2345678"));
    CHECK(!parse_price("1,2"));
    CHECK(format_price(10'020'000) == "10.02");
    CHECK(format_price(10'000'005) == "10.000005");
    CHECK(parse_timestamp("36000.5") == 36'000'500);
    CHECK(format_timestamp(36'000'500) == "36000.500");
    CHECK(!parse_timestamp("-1"));
}

TEST_CASE("sampling takes the quotes of the last trade at or before each grid time") {
    const std::vector<TickRecord> ticks{
        tick(1, 36'001'200, cents(1000), cents(1002)),
        tick(1, 36'004'800, cents(1001), cents(1003)),
        tick(1, 36'010'000, cents(1005), cents(1007)),  // exactly on a grid time
    };
    SessionSpec s;
    s.start = 36'000'000;
    s.end = 36'015'000;
    s.step_seconds = 5;
    const std::vector<int> syms{1};

    // The opening grid point has no trade yet.
    int missing = 0;
    CHECK_FALSE(sample_day(ticks, s, syms, &missing).has_value());
    CHECK(missing == 1);

    s.start = 36'005'000;
    REQUIRE(s.bars_per_day() == 2);
    const auto g = sample_day(ticks, s, syms);
    REQUIRE(g.has_value());
    CHECK((*g)(0, 0) == cents(1001) + cents(1003));  // midprice 10.02
    CHECK((*g)(0, 1) == cents(1005) + cents(1007));  // tie at 36010 is inclusive
    CHECK((*g)(0, 2) == cents(1005) + cents(1007));
}

TEST_CASE("a pre-session trade anchors the opening bar") {
    TickDay day{"d1", {tick(1, 35'000'000, cents(500), cents(502)), tick(2, 36'000'000, cents(300), cents(300))}};
    const std::vector<TickDay> days{day};
    const std::vector<int> syms{1, 2};
    const auto r = sample_bars(days, 60, syms);
    REQUIRE(r.panel.n_days() == 1);
    CHECK(r.dropped.empty());
    CHECK(r.panel.midprice(0, 0, 0) == doctest::Approx(5.01));
    CHECK(r.panel.midprice(0, 1, 345) == doctest::Approx(3.0));
}

TEST_CASE("a day with a symbol lacking an opening trade is dropped") {
    TickDay good{"d1", {tick(1, 36'000'000, cents(500), cents(502)), tick(2, 36'000'000, cents(300), cents(300))}};
    TickDay bad{"d2", {tick(1, 36'000'000, cents(500), cents(502)), tick(2, 36'000'001, cents(300), cents(300))}};
    const std::vector<TickDay> days{good, bad};
    const std::vector<int> syms{1, 2};
    const auto r = sample_bars(days, 30, syms);
    CHECK(r.panel.n_days() == 1);
    REQUIRE(r.dropped.size() == 1);
    CHECK(r.dropped[0].date == "d2");
    CHECK(r.dropped[0].symbol == 2);
}

TEST_CASE("bars per day follow the session length") {
    const std::pair<int, Index> table[] = {{5, 4140}, {10, 2070}, {15, 1380}, {20, 1035}, {25, 828}, {30, 690},
                                           {35, 591}, {40, 517},  {45, 460},  {50, 414},  {55, 376}, {60, 345}};
    for (auto [delta, count] : table) {
        CAPTURE(delta);
        CHECK(bars_per_day(delta) == count);
        CHECK(bars_per_day(delta) == kSessionSeconds / delta);
    }
    CHECK_THROWS_AS((void)bars_per_day(0), Error);
    CHECK_THROWS_AS((void)bars_per_day(20701), Error);
}

TEST_CASE("increments are exact midprice differences") {
    BarPanel p;
    p.symbols = {1};
    p.days = {"d"};
    p.step_seconds = 5;
    Eigen::Matrix<PriceTicks, Eigen::Dynamic, Eigen::Dynamic> g(1, 3);
    g << 2 * cents(1000), 2 * cents(1002), 2 * cents(1001);
    p.mid2.push_back(g);
    const auto inc = increments(p);
    REQUIRE(inc.length() == 2);
    CHECK(inc.values(0, 0) == doctest::Approx(0.02).epsilon(1e-15));
    CHECK(inc.values(0, 1) == doctest::Approx(-0.01).epsilon(1e-15));
}

TEST_CASE("ten days at 5 s give 41400 increments with day starts every 4140") {
    SynthSpec spec;
    spec.n_stocks = 3;
    spec.days = 10;
    IncrementPanel panel = synth_iid(spec);
    panel.values *= 0.01;
    const auto bars = bars_from_increments(panel, 100.0);
    const auto inc = increments(bars);
    CHECK(inc.length() == 41400);
    REQUIRE(inc.n_days() == 10);
    for (Index d = 0; d < 10; ++d) CHECK(inc.day_begin(d) == 4140 * d);
}

TEST_CASE("resampling reconstructed ticks reproduces the bar panel") {
    SynthSpec spec;
    spec.n_stocks = 4;
    spec.days = 3;
    spec.seed = 21;
    IncrementPanel panel = synth_iid(spec);
    panel.values *= 0.01;
    const BarPanel bars = bars_from_increments(panel, 50.0);
    const auto ticks = reconstruct_ticks(bars);
    const auto again = sample_bars(ticks, 5, bars.symbols);
    CHECK(again.dropped.empty());
    REQUIRE(again.panel.n_days() == bars.n_days());
    for (Index d = 0; d < bars.n_days(); ++d)
        CHECK(again.panel.mid2[static_cast<std::size_t>(d)] == bars.mid2[static_cast<std::size_t>(d)]);

    std::ostringstream text;
    write_ticks(text, ticks, true);
    const auto parsed = parse_ticks(text.str());
    CHECK(parsed.rejects.empty());
    const auto third = sample_bars(parsed.days, 5, bars.symbols);
    REQUIRE(third.panel.n_days() == bars.n_days());
    for (Index d = 0; d < bars.n_days(); ++d)
        CHECK(third.panel.mid2[static_cast<std::size_t>(d)] == bars.mid2[static_cast<std::size_t>(d)]);
}

TEST_CASE("integrate inverts increments") {
    SynthSpec spec;
    spec.n_stocks = 2;
    spec.days = 2;
    IncrementPanel panel = synth_iid(spec);
    panel.values *= 0.01;
    const BarPanel bars = bars_from_increments(panel, 20.0);
    const auto inc = increments(bars);
    const auto paths = integrate(inc, bars);
    REQUIRE(paths.size() == 2);
    for (Index d = 0; d < 2; ++d)
        CHECK((paths[static_cast<std::size_t>(d)] - bars.day_midprices(d)).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("coarsening agrees with sampling directly on the coarser clock") {
    SynthSpec spec;
    spec.n_stocks = 3;
    spec.days = 2;
    spec.seed = 5;
    IncrementPanel panel = synth_iid(spec);
    panel.values *= 0.01;
    const BarPanel bars = bars_from_increments(panel, 80.0);
    const auto ticks = reconstruct_ticks(bars);
    for (int delta : {10, 35, 60}) {
        CAPTURE(delta);
        const auto direct = increments(sample_bars(ticks, delta, bars.symbols).panel);
        const auto coarse = coarsen(increments(bars), delta);
        CHECK(coarse.step_seconds == delta);
        REQUIRE(coarse.length() == direct.length());
        CHECK(coarse.day_starts == direct.day_starts);
        CHECK((coarse.values - direct.values).cwiseAbs().maxCoeff() <= 1e-9);
    }
    CHECK_THROWS_AS((void)coarsen(increments(bars), 7), Error);
}

TEST_CASE("slice_days rebases day starts") {
    SynthSpec spec;
    spec.n_stocks = 2;
    spec.days = 5;
    spec.bars_per_day = 10;
    const auto panel = synth_iid(spec);
    const auto s = panel.slice_days(2, 2);
    CHECK(s.length() == 20);
    CHECK(s.day_starts == std::vector<Index>{0, 10});
    CHECK(s.days == std::vector<std::string>{panel.days[2], panel.days[3]});
    CHECK(s.values == panel.values.middleCols(20, 20));
    CHECK_THROWS_AS((void)panel.slice_days(4, 2), Error);
}
