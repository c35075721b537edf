#include "bnsjump/common.hpp"
#include "bnsjump/market_data.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

using namespace bnsjump;
using namespace bnsjump::market;

namespace {

std::string minute(int m) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "%02d:%02d", m / 60, m % 60);
    return buf;
}

// One 240-bar trading day: 09:31-11:30 and 13:01-15:00.
std::string day_csv(const std::string& date, const std::function<double(int)>& price) {
    std::string s;
    int k = 0;
    for (int m = 9 * 60 + 31; m <= 11 * 60 + 30; ++m) s += date + "T" + minute(m) + "," + format_double(price(k++)) + "\n";
    for (int m = 13 * 60 + 1; m <= 15 * 60; ++m) s += date + "T" + minute(m) + "," + format_double(price(k++)) + "\n";
    return s;
}

BarSeries load(const std::string& body) {
    std::istringstream in("timestamp,close\n" + body);
    return load_bars(in, SessionCalendar::shanghai()).series;
}

ReturnSeries returns_of(std::initializer_list<double> pct, std::int32_t day = 1) {
    ReturnSeries r;
    for (double p : pct) r.rows.push_back({Timestamp{}, p, day, 0});
    return r;
}

}  // namespace

TEST(Calendar, DefaultSessionsAndMembership) {
    const auto cal = SessionCalendar::shanghai();
    ASSERT_EQ(cal.sessions.size(), 2u);
    EXPECT_EQ(cal.trading_minutes(), 240);
    EXPECT_EQ(cal.session_of(9 * 3600 + 30 * 60), 0u);
    EXPECT_EQ(cal.session_of(11 * 3600 + 30 * 60), 0u);
    EXPECT_FALSE(cal.session_of(12 * 3600).has_value());
    EXPECT_EQ(cal.session_of(15 * 3600), 1u);
    EXPECT_THROW((SessionCalendar{{{600, 700}, {650, 800}}, "x"}.validate()), ConfigError);
}

TEST(Calendar, FileRoundTrip) {
    std::istringstream in("timezone = UTC\nsessions = 08:00-12:00, 13:30-16:00\n");
    const auto cal = load_calendar(in);
    EXPECT_EQ(cal.timezone, "UTC");
    ASSERT_EQ(cal.sessions.size(), 2u);
    EXPECT_EQ(format_session(cal.sessions[1]), "13:30-16:00");
    std::stringstream ss;
    write_calendar(ss, cal);
    EXPECT_EQ(load_calendar(ss), cal);
}

TEST(Timestamps, ParseAndFormat) {
    const auto ts = parse_timestamp("2021-01-04T09:31");
    EXPECT_EQ(format_timestamp(ts), "2021-01-04T09:31:00");
    EXPECT_EQ(parse_timestamp("2021-01-04 09:31:00"), ts);
    EXPECT_EQ(second_of_day(ts), 9 * 3600 + 31 * 60);
    EXPECT_EQ(format_date(day_number(ts)), "2021-01-04");
    EXPECT_EQ(format_month(day_number(ts)), "2021-01");
    EXPECT_THROW(parse_timestamp("2021-13-04T09:31"), ParseError);
    EXPECT_THROW(parse_timestamp("yesterday"), ParseError);
}

TEST(LoadBars, EmptyBody) {
    std::istringstream in("timestamp,close\n");
    const auto r = load_bars(in, SessionCalendar::shanghai());
    EXPECT_TRUE(r.series.rows.empty());
    EXPECT_EQ(r.rejected_outside_session, 0u);
}

TEST(LoadBars, SingleMorningRow) {
    const auto s = load("2021-01-04T09:31,5000\n");
    ASSERT_EQ(s.rows.size(), 1u);
    EXPECT_EQ(s.rows[0].session, 0u);
    EXPECT_EQ(s.rows[0].close, 5000.0);
}

TEST(LoadBars, LunchRowRejected) {
    std::istringstream in("timestamp,close\n2021-01-04T11:29,1\n2021-01-04T12:00,1\n2021-01-04T13:01,1\n");
    const auto r = load_bars(in, SessionCalendar::shanghai());
    EXPECT_EQ(r.rejected_outside_session, 1u);
    ASSERT_EQ(r.series.rows.size(), 2u);
    EXPECT_EQ(r.series.rows[1].session, 1u);
}

TEST(LoadBars, Errors) {
    std::istringstream bad("timestamp,close\n2021-01-04T09:31,5000\n2021-01-04T09:32,abc\n");
    try {
        load_bars(bad, SessionCalendar::shanghai());
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
    }
    std::istringstream order("timestamp,close\n2021-01-04T09:32,1\n2021-01-04T09:31,1\n");
    EXPECT_THROW(load_bars(order, SessionCalendar::shanghai()), OrderingError);
    std::istringstream header("time,price\n");
    EXPECT_THROW(load_bars(header, SessionCalendar::shanghai()), ParseError);
}

TEST(LoadBars, WriteRoundTrip) {
    const auto s = load(day_csv("2021-01-04", [](int k) { return 5000.0 + 0.25 * k; }));
    std::stringstream ss;
    write_bars(ss, s);
    EXPECT_EQ(load_bars(ss, SessionCalendar::shanghai()).series, s);
}

TEST(Preprocess, SyntheticDayKeepsAllButOpeningWindow) {
    const auto s = load(day_csv("2021-01-04", [](int k) { return 5000.0 + 5.0 * std::sin(k / 15.0); }));
    ASSERT_EQ(s.rows.size(), 240u);
    const auto r = preprocess(s);
    EXPECT_EQ(r.series.rows.size(), 230u);
    EXPECT_EQ(r.removed_trim, 10u);
    EXPECT_EQ(format_timestamp(r.series.rows.front().timestamp), "2021-01-04T09:41:00");
    EXPECT_EQ(format_timestamp(r.series.rows[110].timestamp), "2021-01-04T13:01:00");

    PreprocessOptions all;
    all.trim_all_sessions = true;
    EXPECT_EQ(preprocess(s, all).series.rows.size(), 220u);
}

TEST(Preprocess, ZeroPriceRemoved) {
    std::string body;
    for (int m = 0; m < 100; ++m) body += "2021-01-04T" + minute(9 * 60 + 40 + m) + "," + (m == 50 ? "0" : "100") + "\n";
    const auto s = load(body);
    PreprocessOptions opts;
    opts.trim_minutes = 0;
    const auto r = preprocess(s, opts);
    EXPECT_EQ(r.series.rows.size(), 99u);
    EXPECT_EQ(r.removed_nonpositive, 1u);
    EXPECT_NEAR(r.rejection_rate, 0.01, 1e-3);
    opts.trim_minutes = -1;
    EXPECT_THROW(preprocess(s, opts), InvalidParameter);
}

TEST(Preprocess, OutlierRemovedAndIdempotent) {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g(0.0, 0.5);
    double p = 5000.0;
    std::vector<double> prices;
    for (int k = 0; k < 240; ++k) prices.push_back(p += g(rng));
    prices[150] *= 1.2;
    const auto s = load(day_csv("2021-01-05", [&](int k) { return prices[k]; }));
    const auto once = preprocess(s);
    EXPECT_GE(once.removed_outliers, 1u);
    for (const auto& b : once.series.rows) EXPECT_NE(b.close, prices[150]);
    const auto twice = preprocess(once.series);
    EXPECT_EQ(twice.series, once.series);
    EXPECT_EQ(twice.removed_outliers + twice.removed_trim + twice.removed_nonpositive, 0u);
}

TEST(Resample, Identity) {
    const auto s = load(day_csv("2021-01-04", [](int k) { return 100.0 + k; }));
    EXPECT_EQ(resample(s, 1), s);
    EXPECT_THROW(resample(s, 0), InvalidParameter);
}

TEST(Resample, ThirtyMinuteBuckets) {
    std::string body;
    for (int m = 9 * 60 + 31; m <= 11 * 60 + 30; ++m) body += "2021-01-04T" + minute(m) + "," + std::to_string(m) + "\n";
    const auto s = load(body);
    ASSERT_EQ(s.rows.size(), 120u);
    const auto r = resample(s, 30);
    ASSERT_EQ(r.rows.size(), 4u);
    for (std::size_t b = 0; b < 4; ++b) EXPECT_EQ(r.rows[b].close, s.rows[30 * b + 29].close);
}

TEST(Resample, WholeDayInterval) {
    const auto s = load(day_csv("2021-01-04", [](int k) { return 100.0 + k; }) +
                        day_csv("2021-01-05", [](int k) { return 500.0 + k; }));
    const auto r = resample(s, 240);
    ASSERT_EQ(r.rows.size(), 2u);
    EXPECT_EQ(r.rows[0].close, 339.0);
    EXPECT_EQ(r.rows[1].close, 739.0);
}

TEST(Resample, NestedIntervalsCompose) {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(99.0, 101.0);
    std::string body = day_csv("2021-01-04", [&](int) { return u(rng); }) + day_csv("2021-01-05", [&](int) { return u(rng); });
    auto s = load(body);
    // Gaps inside the day must not change the result either.
    s.rows.erase(s.rows.begin() + 37, s.rows.begin() + 45);
    EXPECT_EQ(resample(resample(s, 5), 30), resample(s, 30));
    EXPECT_EQ(resample(resample(s, 10), 60), resample(s, 60));
}

TEST(Returns, Examples) {
    auto r = pct_change(load("2021-01-04T09:31,100\n2021-01-04T09:32,101\n"));
    ASSERT_EQ(r.rows.size(), 1u);
    EXPECT_NEAR(r.rows[0].pct_change, 1.0, 1e-12);
    r = pct_change(load("2021-01-04T09:31,100\n2021-01-04T09:32,99.9\n"));
    EXPECT_NEAR(r.rows[0].pct_change, -0.1, 1e-12);
    r = pct_change(load("2021-01-04T11:30,100\n2021-01-04T13:01,120\n2021-01-04T13:02,120\n"));
    ASSERT_EQ(r.rows.size(), 1u);
    EXPECT_EQ(r.rows[0].pct_change, 0.0);
    EXPECT_EQ(r.rows[0].session, 1u);
}

TEST(Returns, NeverSpanSessions) {
    const auto s = load(day_csv("2021-01-04", [](int k) { return 100.0 + k; }) +
                        day_csv("2021-01-05", [](int k) { return 100.0 + k; }));
    const auto r = pct_change(s);
    EXPECT_EQ(r.rows.size(), 480u - 4u);
    for (const auto& row : r.rows) {
        EXPECT_TRUE(SessionCalendar::shanghai().session_of(second_of_day(row.timestamp)).has_value());
        EXPECT_GT(row.pct_change, 0.0);
    }
}

TEST(Stats, SymmetricSet) {
    const std::vector<double> v{1, 2, 3, 4, 5};
    const auto s = summarize(v, "g");
    EXPECT_EQ(s.count, 5u);
    EXPECT_DOUBLE_EQ(s.mean, 3.0);
    EXPECT_DOUBLE_EQ(s.median, 3.0);
    EXPECT_EQ(s.min, 1.0);
    EXPECT_EQ(s.max, 5.0);
    EXPECT_NEAR(*s.skewness, 0.0, 1e-15);
    EXPECT_NEAR(*s.excess_kurtosis, -1.2, 1e-12);
}

TEST(Stats, ConstantSeries) {
    const std::vector<double> v{5, 5, 5, 5};
    const auto s = summarize(v, "g");
    EXPECT_EQ(s.mean, 5.0);
    EXPECT_EQ(*s.skewness, 0.0);
    EXPECT_FALSE(s.excess_kurtosis.has_value());
}

// Adjusted skewness G1 computed from raw central moments.
TEST(Stats, MatchesMomentFormulas) {
    std::mt19937_64 rng(2);
    std::exponential_distribution<double> e(1.0);
    std::vector<double> v(500);
    for (auto& x : v) x = e(rng);
    double mean = 0.0;
    for (double x : v) mean += x / v.size();
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double x : v) {
        m2 += std::pow(x - mean, 2) / v.size();
        m3 += std::pow(x - mean, 3) / v.size();
        m4 += std::pow(x - mean, 4) / v.size();
    }
    const double n = v.size();
    const double g1 = m3 / std::pow(m2, 1.5), g2 = m4 / (m2 * m2) - 3.0;
    const auto s = summarize(v, "g");
    EXPECT_NEAR(*s.skewness, std::sqrt(n * (n - 1)) / (n - 2) * g1, 1e-10);
    EXPECT_NEAR(*s.excess_kurtosis, (n - 1) / ((n - 2) * (n - 3)) * ((n + 1) * g2 + 6.0), 1e-10);
    EXPECT_LE(s.min, s.median);
    EXPECT_LE(s.median, s.max);
}

TEST(Stats, MonthlyGroups) {
    const auto s = load(day_csv("2021-01-29", [](int) { return 10.0; }) + day_csv("2021-02-01", [](int) { return 20.0; }));
    const auto overall = descriptive_stats(s, GroupBy::overall);
    ASSERT_EQ(overall.size(), 1u);
    EXPECT_EQ(overall[0].count, 480u);
    EXPECT_DOUBLE_EQ(overall[0].mean, 15.0);
    const auto monthly = descriptive_stats(s, GroupBy::month);
    ASSERT_EQ(monthly.size(), 2u);
    EXPECT_EQ(monthly[0].group, "2021-01");
    EXPECT_EQ(monthly[1].mean, 20.0);
}

TEST(Realized, HandExamples) {
    std::vector<double> zeros{0, 0, 0};
    auto r = realized_window(zeros);
    EXPECT_EQ(r.realized_volatility, 0.0);
    EXPECT_EQ(*r.bipower_variation, 0.0);
    EXPECT_EQ(*r.jump_component, 0.0);

    std::vector<double> alt{1, -1, 1};
    r = realized_window(alt);
    EXPECT_EQ(r.realized_volatility, 3.0);
    EXPECT_DOUBLE_EQ(*r.bipower_variation, std::numbers::pi);
    EXPECT_EQ(*r.jump_component, 0.0);

    std::vector<double> spike{0, 0, 10, 0};
    r = realized_window(spike);
    EXPECT_EQ(r.realized_volatility, 100.0);
    EXPECT_EQ(*r.bipower_variation, 0.0);
    EXPECT_EQ(*r.jump_component, 100.0);

    std::vector<double> one{2};
    r = realized_window(one);
    EXPECT_EQ(r.realized_volatility, 4.0);
    EXPECT_FALSE(r.bipower_variation.has_value());
}

TEST(Realized, WindowsGroupByDayAndMonth) {
    ReturnSeries r = returns_of({1, -1, 1}, 18600);
    for (const auto& row : returns_of({0, 0, 10, 0}, 18601).rows) r.rows.push_back(row);
    for (const auto& row : returns_of({2, 2}, 18630).rows) r.rows.push_back(row);
    const auto days = realized_measures(r, RealizedWindow::day);
    ASSERT_EQ(days.size(), 3u);
    EXPECT_EQ(days[0].realized_volatility, 3.0);
    EXPECT_EQ(*days[1].jump_component, 100.0);
    EXPECT_EQ(days[2].n_returns, 2u);
    const auto months = realized_measures(r, RealizedWindow::month);
    for (const auto& m : months) {
        EXPECT_GE(m.realized_volatility, 0.0);
        if (m.bipower_variation) {
            EXPECT_GE(*m.bipower_variation, 0.0);
            EXPECT_NEAR(*m.jump_component, std::max(m.realized_volatility - *m.bipower_variation, 0.0), 1e-12);
        }
    }
}

TEST(Writers, CsvAndJsonShapes) {
    const std::vector<double> v{1, 2, 3, 4, 5};
    std::ostringstream csv, json;
    write_stats_csv(csv, {summarize(v, "overall")});
    write_stats_json(json, {summarize(v, "overall")});
    EXPECT_EQ(csv.str().substr(0, csv.str().find('\n')), kStatsCsvHeader);
    EXPECT_NE(json.str().find("\"excess_kurtosis\""), std::string::npos);

    std::vector<double> one{2};
    std::ostringstream rcsv;
    write_realized_csv(rcsv, {realized_window(one)});
    EXPECT_EQ(rcsv.str().substr(0, rcsv.str().find('\n')), kRealizedCsvHeader);
    EXPECT_NE(rcsv.str().find(",4,,"), std::string::npos);
}
