#pragma once

// Minute-bar ingestion, session-aware preprocessing and resampling, descriptive statistics and
// realized measures (realized variance, bipower variation, jump component).

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bnsjump::market {

/// Naive local wall-clock time at one-second resolution (the calendar's timezone is a label only).
using Timestamp = std::chrono::sys_seconds;

/// Accepts "YYYY-MM-DDTHH:MM[:SS]" or the same with a space separator.
Timestamp parse_timestamp(std::string_view text, std::size_t line = 0);
std::string format_timestamp(Timestamp ts);
/// Days since 1970-01-01 of the timestamp's date.
std::int32_t day_number(Timestamp ts);
/// Seconds since local midnight.
std::int32_t second_of_day(Timestamp ts);
std::string format_date(std::int32_t day);
std::string format_month(std::int32_t day);

struct Session {
    int open_minute = 0;   // minutes after midnight
    int close_minute = 0;

    int length() const noexcept { return close_minute - open_minute; }
    friend bool operator==(const Session&, const Session&) = default;
};

struct SessionCalendar {
    std::vector<Session> sessions;
    std::string timezone;

    /// 09:30-11:30 and 13:00-15:00, Asia/Shanghai.
    static SessionCalendar shanghai();

    void validate() const;
    /// Session containing the time of day (both ends inclusive), if any.
    std::optional<std::size_t> session_of(std::int32_t second_of_day) const;
    int trading_minutes() const;

    friend bool operator==(const SessionCalendar&, const SessionCalendar&) = default;
};

/// "HH:MM-HH:MM".
Session parse_session(std::string_view text);
std::string format_session(const Session& s);

/// Key-value calendar file: `timezone = ...` and `sessions = 09:30-11:30, 13:00-15:00`.
SessionCalendar load_calendar(std::istream& in);
void write_calendar(std::ostream& out, const SessionCalendar& calendar);

struct Bar {
    Timestamp timestamp;
    double close = 0.0;
    std::int32_t day = 0;
    std::uint32_t session = 0;

    friend bool operator==(const Bar&, const Bar&) = default;
};

struct BarSeries {
    std::vector<Bar> rows;
    SessionCalendar calendar;

    friend bool operator==(const BarSeries&, const BarSeries&) = default;
};

struct LoadResult {
    BarSeries series;
    std::size_t rejected_outside_session = 0;
};

/// CSV with header `timestamp,close`. Rows outside every session are dropped and counted; rows must be
/// strictly increasing in time (OrderingError) and well formed (ParseError with line number).
LoadResult load_bars(std::istream& in, const SessionCalendar& calendar);
void write_bars(std::ostream& out, const BarSeries& series);

enum class OutlierRule { none, sigma };

/// A bar is an outlier when its one-minute percent change exceeds `sigma_multiple` sample standard
/// deviations of that day's changes. Days with fewer than `min_changes` changes are left alone.
struct OutlierPolicy {
    OutlierRule rule = OutlierRule::sigma;
    double sigma_multiple = 10.0;
    std::size_t min_changes = 20;
};

struct PreprocessOptions {
    int trim_minutes = 10;
    bool trim_all_sessions = false;  // also trim after every reopen, not only the daily open
    OutlierPolicy outliers;
};

struct PreprocessResult {
    BarSeries series;
    std::size_t total = 0;
    std::size_t removed_trim = 0;
    std::size_t removed_nonpositive = 0;
    std::size_t removed_outliers = 0;
    double rejection_rate = 0.0;
};

/// Drops bars within trim_minutes of the daily open, non-positive prices, then outliers until none
/// remain. Idempotent.
PreprocessResult preprocess(const BarSeries& series, const PreprocessOptions& opts = {});

/// Last close per bucket. Buckets of interval_minutes are laid out from each session open and
/// truncated at its close; an interval covering the whole trading day yields one bucket per day.
BarSeries resample(const BarSeries& series, int interval_minutes);

struct ReturnRow {
    Timestamp timestamp;
    double pct_change = 0.0;
    std::int32_t day = 0;
    std::uint32_t session = 0;
};

struct ReturnSeries {
    std::vector<ReturnRow> rows;
};

/// 100 * (P_k - P_{k-1}) / P_{k-1} between consecutive bars of one session.
ReturnSeries pct_change(const BarSeries& series);

struct StatsReport {
    std::string group;
    std::size_t count = 0;
    double mean = 0.0;
    double median = 0.0;
    double min = 0.0;
    double max = 0.0;
    std::optional<double> skewness;         // adjusted Fisher-Pearson; 0 for constant data
    std::optional<double> excess_kurtosis;  // adjusted, excess over 3; absent for constant data
};

StatsReport summarize(std::span<const double> values, std::string group);

enum class GroupBy { overall, month };

/// Statistics of close prices per group. Empty groups are omitted and noted.
std::vector<StatsReport> descriptive_stats(const BarSeries& series, GroupBy group_by,
                                           std::vector<std::string>* notes = nullptr);

struct RealizedRow {
    std::string window;
    Timestamp window_end;
    std::size_t n_returns = 0;
    double realized_volatility = 0.0;           // sum r_i^2
    std::optional<double> bipower_variation;    // (pi/2) sum |r_i||r_{i-1}|, needs >= 2 returns
    std::optional<double> jump_component;       // max(RV - BV, 0)
};

enum class RealizedWindow { day, month };

/// Realized measures of one window of returns.
RealizedRow realized_window(std::span<const double> returns);

std::vector<RealizedRow> realized_measures(const ReturnSeries& returns, RealizedWindow window);

inline constexpr const char* kStatsCsvHeader = "group,count,mean,median,min,max,skewness,excess_kurtosis";
inline constexpr const char* kRealizedCsvHeader =
    "window,window_end,n_returns,realized_volatility,bipower_variation,jump_component";

void write_stats_csv(std::ostream& out, const std::vector<StatsReport>& stats);
void write_stats_json(std::ostream& out, const std::vector<StatsReport>& stats);
void write_realized_csv(std::ostream& out, const std::vector<RealizedRow>& rows);
void write_realized_json(std::ostream& out, const std::vector<RealizedRow>& rows);

}  // namespace bnsjump::market
