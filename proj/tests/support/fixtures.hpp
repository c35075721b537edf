#pragma once

// Test-only data generators and independent reference implementations.

#include "bnsjump/classifiers.hpp"
#include "bnsjump/jump_labeling.hpp"
#include "bnsjump/market_data.hpp"

#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace testsupport {

// Two Gaussian blobs at -shift*(1..1) (class 0) and +shift*(1..1) (class 1) with unit spread. Points whose
// distance to the hyperplane sum(x) = 0 is below margin/2 are redrawn, so the classes are linearly
// separable with the given margin.
inline bnsjump::labeling::LabeledDataset separable_blobs(std::size_t n, std::size_t d, double shift, double margin,
                                                         double share_of_ones, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::bernoulli_distribution coin(share_of_ones);
    bnsjump::labeling::LabeledDataset ds;
    ds.window_len = d;
    ds.n_indexed = n;
    const double norm = std::sqrt(static_cast<double>(d));
    for (std::size_t i = 0; i < n; ++i) {
        bnsjump::labeling::LabeledRow row;
        row.index = static_cast<std::int64_t>(i);
        row.theta = coin(rng) ? 1 : 0;
        const double sign = row.theta == 1 ? 1.0 : -1.0;
        while (true) {
            row.features.assign(d, 0.0);
            double proj = 0.0;
            for (auto& f : row.features) {
                f = sign * shift + noise(rng);
                proj += f;
            }
            proj /= norm;
            if (sign * proj >= margin / 2.0) break;
        }
        ds.rows.push_back(std::move(row));
    }
    return ds;
}

// Random return series with session breaks: `n` returns, each new row starting a new session with
// probability `p_break`, pct changes uniform in [-0.3, 0.3] rounded to 0.05 so threshold ties occur.
inline bnsjump::market::ReturnSeries random_returns(std::size_t n, double p_break, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> step(-6, 6);
    std::bernoulli_distribution brk(p_break);
    bnsjump::market::ReturnSeries r;
    std::int32_t day = 18000;
    std::uint32_t session = 0;
    std::int64_t sec = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0 && brk(rng)) {
            if (session == 1) {
                ++day;
                session = 0;
            } else {
                session = 1;
            }
        }
        sec += 60;
        bnsjump::market::ReturnRow row;
        row.timestamp = bnsjump::market::Timestamp(std::chrono::seconds(sec));
        row.pct_change = 0.05 * step(rng);
        row.day = day;
        row.session = session;
        r.rows.push_back(row);
    }
    return r;
}

// Literal reading of the labeling rule: an anchor i is kept when every row from i-window_len+1 to
// i+lookahead exists and shares i's (day, session); theta counts marks in (i, i+lookahead].
inline std::vector<std::pair<std::int64_t, int>> brute_force_labels(const bnsjump::market::ReturnSeries& r,
                                                                    const std::vector<bool>& marks,
                                                                    const bnsjump::labeling::LabelingConfig& cfg) {
    std::vector<std::pair<std::int64_t, int>> out;
    const auto n = static_cast<std::int64_t>(r.rows.size());
    const auto w = static_cast<std::int64_t>(cfg.window_len);
    const auto L = static_cast<std::int64_t>(cfg.lookahead);
    std::int64_t session_start = 0;
    for (std::int64_t i = 0; i < n; ++i) {
        if (i > 0 && (r.rows[i].day != r.rows[i - 1].day || r.rows[i].session != r.rows[i - 1].session)) session_start = i;
        bool ok = i - w + 1 >= 0 && i + L < n;
        for (std::int64_t j = i - w + 1; ok && j <= i + L; ++j) {
            ok = r.rows[j].day == r.rows[i].day && r.rows[j].session == r.rows[i].session;
        }
        if (!ok) continue;
        // Stride counts from the first anchor of the session.
        const std::int64_t first_anchor = session_start + w - 1;
        if ((i - first_anchor) % static_cast<std::int64_t>(cfg.stride) != 0) continue;
        int count = 0;
        for (std::int64_t j = i + 1; j <= i + L; ++j) count += marks[j] ? 1 : 0;
        out.emplace_back(i, count >= static_cast<int>(cfg.min_jumps) ? 1 : 0);
    }
    return out;
}

}  // namespace testsupport
