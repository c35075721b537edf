#include "bnsjump/jump_labeling.hpp"

#include "bnsjump/common.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

namespace bnsjump::labeling {

Direction parse_direction(std::string_view text) {
    text = trim(text);
    if (text == "down") return Direction::down;
    if (text == "up") return Direction::up;
    if (text == "both") return Direction::both;
    throw ConfigError("direction must be down, up or both, got '" + std::string(text) + "'");
}

std::string to_string(Direction d) {
    switch (d) {
        case Direction::down: return "down";
        case Direction::up: return "up";
        case Direction::both: return "both";
    }
    return "down";
}

void LabelingConfig::validate() const {
    if (window_len == 0 || lookahead == 0 || min_jumps == 0 || stride == 0) {
        throw InvalidParameter("window_len, lookahead, min_jumps and stride must be positive");
    }
    if (!(K > 0.0) || !std::isfinite(K)) throw InvalidParameter("K must be positive");
}

std::vector<IndexedReturn> index_series(const market::ReturnSeries& returns) {
    std::vector<IndexedReturn> out;
    out.reserve(returns.rows.size());
    for (std::size_t i = 0; i < returns.rows.size(); ++i) {
        out.push_back({static_cast<std::int64_t>(i), returns.rows[i]});
    }
    return out;
}

bool is_big_jump(double pct, const LabelingConfig& cfg) {
    const auto meets = [&](double magnitude) {
        return cfg.strict ? magnitude > cfg.K + kThresholdTolerance : magnitude >= cfg.K - kThresholdTolerance;
    };
    switch (cfg.direction) {
        case Direction::down: return meets(-pct);
        case Direction::up: return meets(pct);
        case Direction::both: return meets(std::abs(pct));
    }
    return false;
}

std::vector<bool> mark_big_jumps(const market::ReturnSeries& returns, const LabelingConfig& cfg) {
    cfg.validate();
    std::vector<bool> marks(returns.rows.size());
    for (std::size_t i = 0; i < marks.size(); ++i) marks[i] = is_big_jump(returns.rows[i].pct_change, cfg);
    return marks;
}

LabeledDataset build_dataset(const std::vector<IndexedReturn>& returns, const std::vector<bool>& marks,
                             const LabelingConfig& cfg) {
    cfg.validate();
    if (marks.size() != returns.size()) throw InvalidParameter("marks are not aligned with returns");

    LabeledDataset ds;
    ds.window_len = cfg.window_len;
    ds.n_indexed = returns.size();
    if (returns.size() < cfg.window_len + cfg.lookahead) {
        ds.warnings.push_back("series has " + std::to_string(returns.size()) + " returns, fewer than window_len + lookahead = " +
                              std::to_string(cfg.window_len + cfg.lookahead) + "; dataset is empty");
        return ds;
    }

    // Prefix sums of marks for O(1) horizon counts.
    std::vector<std::size_t> prefix(marks.size() + 1, 0);
    for (std::size_t i = 0; i < marks.size(); ++i) prefix[i + 1] = prefix[i] + (marks[i] ? 1 : 0);

    std::size_t begin = 0;
    while (begin < returns.size()) {
        std::size_t end = begin + 1;
        while (end < returns.size() && returns[end].row.day == returns[begin].row.day &&
               returns[end].row.session == returns[begin].row.session) {
            ++end;
        }
        for (std::size_t i = begin + cfg.window_len - 1; i + cfg.lookahead < end; i += cfg.stride) {
            LabeledRow row;
            row.index = returns[i].index;
            row.features.reserve(cfg.window_len);
            for (std::size_t j = i + 1 - cfg.window_len; j <= i; ++j) row.features.push_back(returns[j].row.pct_change);
            const std::size_t jumps = prefix[i + cfg.lookahead + 1] - prefix[i + 1];
            row.theta = jumps >= cfg.min_jumps ? 1 : 0;
            ds.rows.push_back(std::move(row));
        }
        begin = end;
    }
    if (ds.rows.empty()) ds.warnings.push_back("no session holds window_len + lookahead returns; dataset is empty");
    return ds;
}

IndexRange parse_range(std::string_view text) {
    text = trim(text);
    if (text.empty()) return {};
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) throw ConfigError("index range must look like a:b, got '" + std::string(text) + "'");
    try {
        return {parse_int(text.substr(0, colon)), parse_int(text.substr(colon + 1))};
    } catch (const ParseError&) {
        throw ConfigError("index range must look like a:b, got '" + std::string(text) + "'");
    }
}

std::string format_range(const IndexRange& r) {
    return r.empty() ? std::string() : std::to_string(r.first) + ":" + std::to_string(r.last);
}

SplitResult split(const LabeledDataset& dataset, const SplitSpec& spec) {
    const auto n = static_cast<std::int64_t>(dataset.n_indexed);
    const auto check = [&](const IndexRange& r, const char* which) {
        if (r.empty()) return;
        if (r.first < 0 || r.last >= n) {
            throw InvalidParameter(std::string(which) + " range " + format_range(r) + " is outside [0, " +
                                   std::to_string(n - 1) + "]");
        }
    };
    check(spec.train, "train");
    check(spec.test, "test");
    if (!spec.train.empty() && !spec.test.empty() && spec.train.last >= spec.test.first) {
        throw InvalidParameter("train range must end before the test range begins (split " + spec.name + ")");
    }

    SplitResult out;
    out.train.window_len = out.test.window_len = dataset.window_len;
    out.train.n_indexed = out.test.n_indexed = dataset.n_indexed;
    for (const auto& row : dataset.rows) {
        if (spec.train.contains(row.index)) out.train.rows.push_back(row);
        else if (spec.test.contains(row.index)) out.test.rows.push_back(row);
    }
    return out;
}

IndexRange resolve_dates(const std::vector<IndexedReturn>& returns, market::Timestamp from, market::Timestamp to) {
    IndexRange r;
    bool found = false;
    for (const auto& ir : returns) {
        if (ir.row.timestamp < from || ir.row.timestamp > to) continue;
        if (!found) r.first = ir.index;
        r.last = ir.index;
        found = true;
    }
    return found ? r : IndexRange{};
}

void write_dataset_csv(std::ostream& out, const LabeledDataset& dataset) {
    out << "index";
    for (std::size_t j = 1; j <= dataset.window_len; ++j) out << ",f" << j;
    out << ",theta\n";
    for (const auto& row : dataset.rows) {
        out << row.index;
        for (double f : row.features) out << ',' << format_double(f);
        out << ',' << row.theta << '\n';
    }
}

LabeledDataset read_dataset_csv(std::istream& in) {
    std::string line;
    std::size_t line_no = 1;
    if (!std::getline(in, line)) throw ParseError("empty dataset file", line_no);
    std::vector<std::string> header;
    {
        std::string_view rest = trim(line);
        while (true) {
            const auto comma = rest.find(',');
            header.emplace_back(trim(rest.substr(0, comma)));
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
    }
    if (header.size() < 3 || header.front() != "index" || header.back() != "theta") {
        throw ParseError("expected header index,f1..fN,theta", line_no);
    }
    LabeledDataset ds;
    ds.window_len = header.size() - 2;
    for (std::size_t j = 1; j <= ds.window_len; ++j) {
        if (header[j] != "f" + std::to_string(j)) throw ParseError("expected column f" + std::to_string(j), line_no);
    }
    std::int64_t max_index = -1;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view rest = trim(line);
        if (rest.empty()) continue;
        std::vector<std::string_view> fields;
        while (true) {
            const auto comma = rest.find(',');
            fields.push_back(rest.substr(0, comma));
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        if (fields.size() != header.size()) throw ParseError("expected " + std::to_string(header.size()) + " fields", line_no);
        LabeledRow row;
        row.index = parse_int(fields.front(), line_no);
        if (!ds.rows.empty() && row.index <= ds.rows.back().index) throw ParseError("index must be increasing", line_no);
        for (std::size_t j = 1; j + 1 < fields.size(); ++j) row.features.push_back(parse_double(fields[j], line_no));
        const auto theta = parse_int(fields.back(), line_no);
        if (theta != 0 && theta != 1) throw ParseError("theta must be 0 or 1", line_no);
        row.theta = static_cast<int>(theta);
        max_index = std::max(max_index, row.index);
        ds.rows.push_back(std::move(row));
    }
    ds.n_indexed = static_cast<std::size_t>(max_index + 1);
    return ds;
}

void write_index_map_csv(std::ostream& out, const std::vector<IndexedReturn>& returns, const std::vector<bool>& marks) {
    out << "index,timestamp,pct_change,is_big_jump\n";
    for (std::size_t i = 0; i < returns.size(); ++i) {
        out << returns[i].index << ',' << market::format_timestamp(returns[i].row.timestamp) << ','
            << format_double(returns[i].row.pct_change) << ',' << (i < marks.size() && marks[i] ? 1 : 0) << '\n';
    }
}

}  // namespace bnsjump::labeling
