#include "bnsjump/market_data.hpp"

#include "bnsjump/common.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include <cmath>
#include <istream>
#include <ostream>

namespace bnsjump::market {

using namespace std::chrono;

namespace {

int parse_fixed(std::string_view text, std::size_t pos, std::size_t len, std::string_view whole, std::size_t line) {
    if (pos + len > text.size()) throw ParseError("truncated timestamp '" + std::string(whole) + "'", line);
    int v = 0;
    for (std::size_t i = pos; i < pos + len; ++i) {
        const char c = text[i];
        if (c < '0' || c > '9') throw ParseError("bad timestamp '" + std::string(whole) + "'", line);
        v = v * 10 + (c - '0');
    }
    return v;
}

void expect_char(std::string_view text, std::size_t pos, std::string_view allowed, std::size_t line) {
    if (pos >= text.size() || allowed.find(text[pos]) == std::string_view::npos) {
        throw ParseError("bad timestamp '" + std::string(text) + "'", line);
    }
}

}  // namespace

Timestamp parse_timestamp(std::string_view text, std::size_t line) {
    text = trim(text);
    // YYYY-MM-DDTHH:MM[:SS]
    const int y = parse_fixed(text, 0, 4, text, line);
    expect_char(text, 4, "-", line);
    const int mo = parse_fixed(text, 5, 2, text, line);
    expect_char(text, 7, "-", line);
    const int d = parse_fixed(text, 8, 2, text, line);
    expect_char(text, 10, "T ", line);
    const int hh = parse_fixed(text, 11, 2, text, line);
    expect_char(text, 13, ":", line);
    const int mm = parse_fixed(text, 14, 2, text, line);
    int ss = 0;
    if (text.size() > 16) {
        expect_char(text, 16, ":", line);
        ss = parse_fixed(text, 17, 2, text, line);
        if (text.size() != 19) throw ParseError("trailing characters in timestamp '" + std::string(text) + "'", line);
    }
    const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok() || hh > 23 || mm > 59 || ss > 59) throw ParseError("invalid timestamp '" + std::string(text) + "'", line);
    return sys_days{ymd} + hours{hh} + minutes{mm} + seconds{ss};
}

std::int32_t day_number(Timestamp ts) {
    return static_cast<std::int32_t>(floor<days>(ts).time_since_epoch().count());
}

std::int32_t second_of_day(Timestamp ts) {
    return static_cast<std::int32_t>((ts - floor<days>(ts)).count());
}

std::string format_date(std::int32_t day_no) {
    const year_month_day ymd{sys_days{days{day_no}}};
    return fmt::format("{:04d}-{:02d}-{:02d}", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                       static_cast<unsigned>(ymd.day()));
}

std::string format_month(std::int32_t day_no) {
    const year_month_day ymd{sys_days{days{day_no}}};
    return fmt::format("{:04d}-{:02d}", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()));
}

std::string format_timestamp(Timestamp ts) {
    const std::int32_t sod = second_of_day(ts);
    return fmt::format("{}T{:02d}:{:02d}:{:02d}", format_date(day_number(ts)), sod / 3600, (sod / 60) % 60, sod % 60);
}

SessionCalendar SessionCalendar::shanghai() {
    return {{{9 * 60 + 30, 11 * 60 + 30}, {13 * 60, 15 * 60}}, "Asia/Shanghai"};
}

void SessionCalendar::validate() const {
    if (sessions.empty()) throw ConfigError("calendar needs at least one session");
    for (std::size_t i = 0; i < sessions.size(); ++i) {
        const auto& s = sessions[i];
        if (s.open_minute < 0 || s.close_minute > 24 * 60 || s.close_minute <= s.open_minute) {
            throw ConfigError("invalid session " + format_session(s));
        }
        if (i > 0 && s.open_minute <= sessions[i - 1].close_minute) {
            throw ConfigError("sessions must be ordered and non-overlapping");
        }
    }
}

std::optional<std::size_t> SessionCalendar::session_of(std::int32_t sod) const {
    for (std::size_t i = 0; i < sessions.size(); ++i) {
        if (sod >= sessions[i].open_minute * 60 && sod <= sessions[i].close_minute * 60) return i;
    }
    return std::nullopt;
}

int SessionCalendar::trading_minutes() const {
    int total = 0;
    for (const auto& s : sessions) total += s.length();
    return total;
}

Session parse_session(std::string_view text) {
    text = trim(text);
    const auto hm = [&](std::string_view part) {
        part = trim(part);
        const auto colon = part.find(':');
        if (colon == std::string_view::npos) throw ConfigError("bad session time '" + std::string(part) + "'");
        try {
            const auto h = parse_int(part.substr(0, colon));
            const auto m = parse_int(part.substr(colon + 1));
            if (h < 0 || h > 24 || m < 0 || m > 59) throw ConfigError("bad session time '" + std::string(part) + "'");
            return static_cast<int>(h * 60 + m);
        } catch (const ParseError&) {
            throw ConfigError("bad session time '" + std::string(part) + "'");
        }
    };
    const auto dash = text.find('-');
    if (dash == std::string_view::npos) throw ConfigError("session must look like HH:MM-HH:MM, got '" + std::string(text) + "'");
    return {hm(text.substr(0, dash)), hm(text.substr(dash + 1))};
}

std::string format_session(const Session& s) {
    return fmt::format("{:02d}:{:02d}-{:02d}:{:02d}", s.open_minute / 60, s.open_minute % 60, s.close_minute / 60,
                       s.close_minute % 60);
}

SessionCalendar load_calendar(std::istream& in) {
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError(std::string("calendar file: ") + e.what());
    }
    SessionCalendar cal = SessionCalendar::shanghai();
    for (const auto& [key, node] : tree) {
        if (!node.empty()) throw ConfigError("calendar file takes no sections, found [" + key + "]");
        const std::string value = node.get_value<std::string>();
        if (key == "timezone") {
            cal.timezone = std::string(trim(value));
        } else if (key == "sessions") {
            cal.sessions.clear();
            std::string_view rest = value;
            while (!rest.empty()) {
                const auto comma = rest.find(',');
                cal.sessions.push_back(parse_session(rest.substr(0, comma)));
                if (comma == std::string_view::npos) break;
                rest.remove_prefix(comma + 1);
            }
        } else {
            throw ConfigError("unknown calendar key '" + key + "'");
        }
    }
    cal.validate();
    return cal;
}

void write_calendar(std::ostream& out, const SessionCalendar& calendar) {
    out << "timezone = " << calendar.timezone << '\n' << "sessions = ";
    for (std::size_t i = 0; i < calendar.sessions.size(); ++i) {
        if (i) out << ", ";
        out << format_session(calendar.sessions[i]);
    }
    out << '\n';
}

LoadResult load_bars(std::istream& in, const SessionCalendar& calendar) {
    calendar.validate();
    LoadResult result;
    result.series.calendar = calendar;

    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    std::optional<Timestamp> last;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view = trim(line);
        if (line_no == 1 && view.size() >= 3 && view.substr(0, 3) == "\xEF\xBB\xBF") view.remove_prefix(3);
        if (view.empty()) continue;
        if (!header_seen) {
            if (view != "timestamp,close") throw ParseError("expected header 'timestamp,close'", line_no);
            header_seen = true;
            continue;
        }
        const auto comma = view.find(',');
        if (comma == std::string_view::npos || view.find(',', comma + 1) != std::string_view::npos) {
            throw ParseError("expected 2 fields", line_no);
        }
        const Timestamp ts = parse_timestamp(view.substr(0, comma), line_no);
        const double close = parse_double(view.substr(comma + 1), line_no);
        if (!std::isfinite(close)) throw ParseError("close must be finite", line_no);
        if (last && !(ts > *last)) {
            throw OrderingError("timestamps must be strictly increasing (line " + std::to_string(line_no) + ")");
        }
        last = ts;
        const auto session = calendar.session_of(second_of_day(ts));
        if (!session) {
            ++result.rejected_outside_session;
            continue;
        }
        result.series.rows.push_back({ts, close, day_number(ts), static_cast<std::uint32_t>(*session)});
    }
    return result;
}

void write_bars(std::ostream& out, const BarSeries& series) {
    out << "timestamp,close\n";
    for (const Bar& b : series.rows) out << format_timestamp(b.timestamp) << ',' << format_double(b.close) << '\n';
}

namespace {

std::string opt_field(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

nlohmann::ordered_json opt_json(const std::optional<double>& v) {
    return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

}  // namespace

void write_stats_csv(std::ostream& out, const std::vector<StatsReport>& stats) {
    out << kStatsCsvHeader << '\n';
    for (const auto& s : stats) {
        out << s.group << ',' << s.count << ',' << format_double(s.mean) << ',' << format_double(s.median) << ','
            << format_double(s.min) << ',' << format_double(s.max) << ',' << opt_field(s.skewness) << ','
            << opt_field(s.excess_kurtosis) << '\n';
    }
}

void write_stats_json(std::ostream& out, const std::vector<StatsReport>& stats) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& s : stats) {
        arr.push_back({{"group", s.group},
                       {"count", s.count},
                       {"mean", s.mean},
                       {"median", s.median},
                       {"min", s.min},
                       {"max", s.max},
                       {"skewness", opt_json(s.skewness)},
                       {"excess_kurtosis", opt_json(s.excess_kurtosis)}});
    }
    out << arr.dump(2) << '\n';
}

void write_realized_csv(std::ostream& out, const std::vector<RealizedRow>& rows) {
    out << kRealizedCsvHeader << '\n';
    for (const auto& r : rows) {
        out << r.window << ',' << format_timestamp(r.window_end) << ',' << r.n_returns << ','
            << format_double(r.realized_volatility) << ',' << opt_field(r.bipower_variation) << ','
            << opt_field(r.jump_component) << '\n';
    }
}

void write_realized_json(std::ostream& out, const std::vector<RealizedRow>& rows) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
        arr.push_back({{"window", r.window},
                       {"window_end", format_timestamp(r.window_end)},
                       {"n_returns", r.n_returns},
                       {"realized_volatility", r.realized_volatility},
                       {"bipower_variation", opt_json(r.bipower_variation)},
                       {"jump_component", opt_json(r.jump_component)}});
    }
    out << arr.dump(2) << '\n';
}

}  // namespace bnsjump::market
