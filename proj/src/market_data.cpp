#include "bnsjump/market_data.hpp"

#include "bnsjump/common.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>

namespace bnsjump::market {

namespace {

// Groups consecutive rows sharing (day, session) and calls fn(begin, end) per group.
template <typename Row, typename Fn>
void for_each_session(const std::vector<Row>& rows, Fn&& fn) {
    std::size_t begin = 0;
    while (begin < rows.size()) {
        std::size_t end = begin + 1;
        while (end < rows.size() && rows[end].day == rows[begin].day && rows[end].session == rows[begin].session) ++end;
        fn(begin, end);
        begin = end;
    }
}

double sample_std(std::span<const double> xs) {
    if (xs.size() < 2) return 0.0;
    const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

// Index of the worst outlier among `bars` (all of one day), or npos.
std::size_t worst_outlier(const std::vector<Bar>& bars, const OutlierPolicy& policy) {
    std::vector<double> changes;
    std::vector<std::size_t> owner;
    for (std::size_t k = 1; k < bars.size(); ++k) {
        if (bars[k].session != bars[k - 1].session) continue;
        changes.push_back(100.0 * (bars[k].close - bars[k - 1].close) / bars[k - 1].close);
        owner.push_back(k);
    }
    if (changes.size() < policy.min_changes) return std::string::npos;
    const double limit = policy.sigma_multiple * sample_std(changes);
    if (!(limit > 0.0)) return std::string::npos;
    std::size_t worst = std::string::npos;
    double worst_abs = limit;
    for (std::size_t i = 0; i < changes.size(); ++i) {
        if (std::abs(changes[i]) > worst_abs) {
            worst_abs = std::abs(changes[i]);
            worst = owner[i];
        }
    }
    return worst;
}

}  // namespace

PreprocessResult preprocess(const BarSeries& series, const PreprocessOptions& opts) {
    if (opts.trim_minutes < 0) throw InvalidParameter("trim_minutes must be >= 0");
    if (opts.outliers.rule == OutlierRule::sigma && !(opts.outliers.sigma_multiple > 0.0)) {
        throw InvalidParameter("outlier sigma multiple must be positive");
    }
    const auto& sessions = series.calendar.sessions;

    PreprocessResult result;
    result.total = series.rows.size();
    result.series.calendar = series.calendar;

    std::vector<Bar> kept;
    kept.reserve(series.rows.size());
    for (const Bar& bar : series.rows) {
        const bool trimmed_session = bar.session == 0 || opts.trim_all_sessions;
        if (trimmed_session && bar.session < sessions.size()) {
            const std::int32_t since_open = second_of_day(bar.timestamp) - sessions[bar.session].open_minute * 60;
            if (since_open <= opts.trim_minutes * 60) {
                ++result.removed_trim;
                continue;
            }
        }
        if (!(bar.close > 0.0)) {
            ++result.removed_nonpositive;
            continue;
        }
        kept.push_back(bar);
    }

    if (opts.outliers.rule == OutlierRule::sigma) {
        std::vector<Bar> cleaned;
        cleaned.reserve(kept.size());
        std::size_t begin = 0;
        while (begin < kept.size()) {
            std::size_t end = begin + 1;
            while (end < kept.size() && kept[end].day == kept[begin].day) ++end;
            std::vector<Bar> day(kept.begin() + static_cast<std::ptrdiff_t>(begin), kept.begin() + static_cast<std::ptrdiff_t>(end));
            for (std::size_t idx; (idx = worst_outlier(day, opts.outliers)) != std::string::npos;) {
                day.erase(day.begin() + static_cast<std::ptrdiff_t>(idx));
                ++result.removed_outliers;
            }
            cleaned.insert(cleaned.end(), day.begin(), day.end());
            begin = end;
        }
        kept = std::move(cleaned);
    }

    result.series.rows = std::move(kept);
    result.rejection_rate = result.total == 0 ? 0.0
                                              : static_cast<double>(result.total - result.series.rows.size()) /
                                                    static_cast<double>(result.total);
    return result;
}

BarSeries resample(const BarSeries& series, int interval_minutes) {
    if (interval_minutes <= 0) throw InvalidParameter("resample interval must be positive");
    const auto& sessions = series.calendar.sessions;
    const bool whole_day = interval_minutes >= series.calendar.trading_minutes();
    const std::int64_t width = static_cast<std::int64_t>(interval_minutes) * 60;

    BarSeries out;
    out.calendar = series.calendar;
    bool have_key = false;
    std::int64_t day = 0, session = 0, bucket = 0;
    for (const Bar& bar : series.rows) {
        std::int64_t s = whole_day ? 0 : bar.session;
        std::int64_t b = 0;
        if (!whole_day && bar.session < sessions.size()) {
            const std::int64_t elapsed = second_of_day(bar.timestamp) - sessions[bar.session].open_minute * 60;
            b = elapsed <= 0 ? 0 : (elapsed - 1) / width;
        }
        if (have_key && bar.day == day && s == session && b == bucket) {
            out.rows.back() = bar;
        } else {
            out.rows.push_back(bar);
            have_key = true;
            day = bar.day;
            session = s;
            bucket = b;
        }
    }
    return out;
}

ReturnSeries pct_change(const BarSeries& series) {
    ReturnSeries out;
    for_each_session(series.rows, [&](std::size_t begin, std::size_t end) {
        for (std::size_t k = begin + 1; k < end; ++k) {
            const Bar& prev = series.rows[k - 1];
            const Bar& cur = series.rows[k];
            out.rows.push_back({cur.timestamp, 100.0 * (cur.close - prev.close) / prev.close, cur.day, cur.session});
        }
    });
    return out;
}

StatsReport summarize(std::span<const double> values, std::string group) {
    StatsReport r;
    r.group = std::move(group);
    r.count = values.size();
    if (values.empty()) return r;

    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    r.min = sorted.front();
    r.max = sorted.back();
    r.median = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    r.mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(n);

    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double x : values) {
        const double d = x - r.mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    const double nd = static_cast<double>(n);
    m2 /= nd;
    m3 /= nd;
    m4 /= nd;
    // Rounding noise on constant data must read as zero spread.
    const bool constant = r.max == r.min || m2 <= 1e-14 * r.mean * r.mean;
    if (n >= 3) {
        if (constant) {
            r.skewness = 0.0;
        } else {
            const double g1 = m3 / std::pow(m2, 1.5);
            r.skewness = g1 * std::sqrt(nd * (nd - 1.0)) / (nd - 2.0);
        }
    }
    if (n >= 4 && !constant) {
        const double g2 = m4 / (m2 * m2) - 3.0;
        r.excess_kurtosis = ((nd + 1.0) * g2 + 6.0) * (nd - 1.0) / ((nd - 2.0) * (nd - 3.0));
    }
    return r;
}

std::vector<StatsReport> descriptive_stats(const BarSeries& series, GroupBy group_by, std::vector<std::string>* notes) {
    std::vector<StatsReport> out;
    if (group_by == GroupBy::overall) {
        if (series.rows.empty()) {
            if (notes) notes->push_back("overall: no rows, group omitted");
            return out;
        }
        std::vector<double> closes;
        closes.reserve(series.rows.size());
        for (const Bar& b : series.rows) closes.push_back(b.close);
        out.push_back(summarize(closes, "overall"));
        return out;
    }

    std::map<std::string, std::vector<double>> months;
    for (const Bar& b : series.rows) months[format_month(b.day)].push_back(b.close);
    for (auto& [label, closes] : months) {
        if (closes.empty()) {
            if (notes) notes->push_back(label + ": no rows, group omitted");
            continue;
        }
        out.push_back(summarize(closes, label));
    }
    return out;
}

RealizedRow realized_window(std::span<const double> returns) {
    RealizedRow row;
    row.n_returns = returns.size();
    for (double r : returns) row.realized_volatility += r * r;
    if (returns.size() >= 2) {
        double bv = 0.0;
        for (std::size_t i = 1; i < returns.size(); ++i) bv += std::abs(returns[i]) * std::abs(returns[i - 1]);
        bv *= std::numbers::pi / 2.0;
        row.bipower_variation = bv;
        row.jump_component = std::max(row.realized_volatility - bv, 0.0);
    }
    return row;
}

std::vector<RealizedRow> realized_measures(const ReturnSeries& returns, RealizedWindow window) {
    std::vector<RealizedRow> out;
    const auto label_of = [window](const ReturnRow& r) {
        return window == RealizedWindow::day ? format_date(r.day) : format_month(r.day);
    };
    std::size_t begin = 0;
    const auto& rows = returns.rows;
    while (begin < rows.size()) {
        const std::string label = label_of(rows[begin]);
        std::size_t end = begin + 1;
        while (end < rows.size() && label_of(rows[end]) == label) ++end;
        std::vector<double> values;
        values.reserve(end - begin);
        for (std::size_t k = begin; k < end; ++k) values.push_back(rows[k].pct_change);
        RealizedRow row = realized_window(values);
        row.window = label;
        row.window_end = rows[end - 1].timestamp;
        out.push_back(std::move(row));
        begin = end;
    }
    return out;
}

}  // namespace bnsjump::market
