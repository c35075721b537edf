#include "bnsjump/common.hpp"
#include "bnsjump/jump_labeling.hpp"

#include "../support/fixtures.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace bnsjump;
using namespace bnsjump::labeling;
using market::ReturnRow;
using market::ReturnSeries;

namespace {

ReturnSeries one_session(std::vector<double> pct) {
    ReturnSeries r;
    std::int64_t sec = 0;
    for (double p : pct) r.rows.push_back({market::Timestamp(std::chrono::seconds(sec += 60)), p, 1, 0});
    return r;
}

std::vector<bool> marks_at(std::size_t n, std::initializer_list<std::size_t> where) {
    std::vector<bool> m(n, false);
    for (auto i : where) m[i] = true;
    return m;
}

int theta_of(const LabeledDataset& ds, std::int64_t index) {
    for (const auto& row : ds.rows) {
        if (row.index == index) return row.theta;
    }
    ADD_FAILURE() << "anchor " << index << " missing";
    return -1;
}

std::size_t ones(const LabeledDataset& ds) {
    std::size_t n = 0;
    for (const auto& r : ds.rows) n += static_cast<std::size_t>(r.theta);
    return n;
}

}  // namespace

TEST(Index, DenseChronological) {
    EXPECT_TRUE(index_series({}).empty());
    const auto idx = index_series(one_session({0.1, 0.2, 0.3}));
    ASSERT_EQ(idx.size(), 3u);
    for (std::int64_t i = 0; i < 3; ++i) EXPECT_EQ(idx[i].index, i);
}

TEST(Marks, Examples) {
    LabelingConfig cfg;
    EXPECT_EQ(mark_big_jumps(one_session({-0.05, -0.10, -0.15}), cfg), (std::vector<bool>{false, true, true}));
    EXPECT_EQ(mark_big_jumps(one_session({0.3, 0.5, 1.0}), cfg), (std::vector<bool>{false, false, false}));
    cfg.direction = Direction::both;
    EXPECT_EQ(mark_big_jumps(one_session({0.2, -0.2}), cfg), (std::vector<bool>{true, true}));
    cfg.direction = Direction::up;
    EXPECT_EQ(mark_big_jumps(one_session({0.2, -0.2, 0.1}), cfg), (std::vector<bool>{true, false, true}));
}

TEST(Marks, DecimalPriceMoveHitsThresholdExactly) {
    LabelingConfig cfg;
    const double pct = 100.0 * (99.9 - 100.0) / 100.0;
    EXPECT_TRUE(is_big_jump(pct, cfg));
    cfg.strict = true;
    EXPECT_FALSE(is_big_jump(pct, cfg));
    EXPECT_TRUE(is_big_jump(-0.11, cfg));
}

TEST(Dataset, NoMarksMeansAllZero) {
    const auto r = one_session(std::vector<double>(40, 0.01));
    const auto ds = build_dataset(index_series(r), std::vector<bool>(40, false), {});
    EXPECT_EQ(ds.rows.size(), 40u - 10u - 10u + 1u);
    EXPECT_EQ(ones(ds), 0u);
}

TEST(Dataset, ThirtyReturnExample) {
    const auto r = one_session(std::vector<double>(30, 0.0));
    const auto ds = build_dataset(index_series(r), marks_at(30, {12, 15}), {});
    EXPECT_EQ(theta_of(ds, 10), 1);
    EXPECT_EQ(theta_of(ds, 16), 0);
    ASSERT_FALSE(ds.rows.empty());
    EXPECT_EQ(ds.rows.front().index, 9);
    EXPECT_EQ(ds.rows.back().index, 19);
    EXPECT_EQ(ds.rows.front().features.size(), 10u);
}

TEST(Dataset, SingleMarkWithMinJumpsOne) {
    LabelingConfig cfg;
    cfg.min_jumps = 1;
    cfg.window_len = 3;
    cfg.lookahead = 3;
    const auto r = one_session(std::vector<double>(12, 0.0));
    const auto ds = build_dataset(index_series(r), marks_at(12, {5}), cfg);
    EXPECT_EQ(theta_of(ds, 4), 1);
    EXPECT_EQ(theta_of(ds, 2), 1);
    EXPECT_EQ(theta_of(ds, 5), 0);
}

TEST(Dataset, FeaturesAreTheWindow) {
    std::vector<double> pct;
    for (int i = 0; i < 25; ++i) pct.push_back(i * 0.01);
    const auto ds = build_dataset(index_series(one_session(pct)), std::vector<bool>(25, false), {});
    for (const auto& row : ds.rows) {
        for (std::size_t j = 0; j < 10; ++j) EXPECT_DOUBLE_EQ(row.features[j], pct[row.index - 9 + j]);
    }
}

TEST(Dataset, ShortSeriesWarns) {
    const auto r = one_session(std::vector<double>(15, 0.0));
    const auto ds = build_dataset(index_series(r), std::vector<bool>(15, false), {});
    EXPECT_TRUE(ds.rows.empty());
    EXPECT_FALSE(ds.warnings.empty());
}

TEST(Dataset, MatchesBruteForceOracle) {
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<std::size_t> len(0, 200), small(1, 12), stride(1, 4), mj(1, 4);
    std::uniform_int_distribution<int> dir(0, 2);
    for (int trial = 0; trial < 1000; ++trial) {
        LabelingConfig cfg;
        cfg.window_len = small(rng);
        cfg.lookahead = small(rng);
        cfg.stride = stride(rng);
        cfg.min_jumps = mj(rng);
        cfg.K = 0.05 * static_cast<double>(small(rng) % 6 + 1);
        cfg.direction = static_cast<Direction>(dir(rng));
        cfg.strict = trial % 3 == 0;
        const auto r = testsupport::random_returns(len(rng), 0.03, rng);
        const auto marks = mark_big_jumps(r, cfg);
        for (std::size_t i = 0; i < r.rows.size(); ++i) {
            const double p = r.rows[i].pct_change;
            const double mag = cfg.direction == Direction::down ? -p : cfg.direction == Direction::up ? p : std::abs(p);
            EXPECT_EQ(marks[i], cfg.strict ? mag > cfg.K + 1e-9 : mag >= cfg.K - 1e-9);
        }
        const auto ds = build_dataset(index_series(r), marks, cfg);
        const auto oracle = testsupport::brute_force_labels(r, marks, cfg);
        ASSERT_EQ(ds.rows.size(), oracle.size()) << "trial " << trial;
        for (std::size_t k = 0; k < oracle.size(); ++k) {
            EXPECT_EQ(ds.rows[k].index, oracle[k].first);
            EXPECT_EQ(ds.rows[k].theta, oracle[k].second);
        }
        EXPECT_EQ(ds.n_indexed, r.rows.size());
    }
}

TEST(Dataset, MonotoneInKAndMinJumps) {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 50; ++trial) {
        const auto r = testsupport::random_returns(200, 0.02, rng);
        const auto idx = index_series(r);
        LabelingConfig cfg;
        cfg.min_jumps = 1;
        std::size_t prev_marks = r.rows.size() + 1, prev_ones = r.rows.size() + 1;
        std::vector<bool> prev(r.rows.size(), true);
        for (double K : {0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35}) {
            cfg.K = K;
            const auto m = mark_big_jumps(r, cfg);
            std::size_t n = 0;
            for (std::size_t i = 0; i < m.size(); ++i) {
                EXPECT_TRUE(!m[i] || prev[i]);
                n += m[i];
            }
            const auto o = ones(build_dataset(idx, m, cfg));
            EXPECT_LE(n, prev_marks);
            EXPECT_LE(o, prev_ones);
            prev_marks = n;
            prev_ones = o;
            prev = m;
        }
        cfg.K = 0.1;
        const auto m = mark_big_jumps(r, cfg);
        prev_ones = r.rows.size() + 1;
        for (std::size_t mj = 1; mj <= 6; ++mj) {
            cfg.min_jumps = mj;
            const auto o = ones(build_dataset(idx, m, cfg));
            EXPECT_LE(o, prev_ones);
            prev_ones = o;
        }
    }
}

TEST(Split, RangeArithmetic) {
    LabeledDataset ds;
    ds.n_indexed = 100;
    for (std::int64_t i = 0; i < 100; ++i) ds.rows.push_back({i, {0.0}, static_cast<int>(i % 2)});
    auto s = split(ds, {"a", parse_range("0:79"), parse_range("80:99")});
    EXPECT_EQ(s.train.rows.size(), 80u);
    EXPECT_EQ(s.test.rows.size(), 20u);
    s = split(ds, {"b", parse_range("0:99"), parse_range("")});
    EXPECT_EQ(s.test.rows.size(), 0u);
    EXPECT_THROW(split(ds, {"c", parse_range("0:50"), parse_range("50:99")}), InvalidParameter);
    EXPECT_THROW(split(ds, {"d", parse_range("0:50"), parse_range("60:100")}), InvalidParameter);
    EXPECT_THROW(split(ds, {"e", parse_range("60:99"), parse_range("0:10")}), InvalidParameter);
    EXPECT_EQ(format_range(parse_range("1316:1644")), "1316:1644");
    EXPECT_THROW(parse_range("5-9"), ConfigError);
}

TEST(Split, SupportDependsOnDataOnly) {
    auto ds = testsupport::separable_blobs(300, 4, 1.0, 0.0, 0.3, 5);
    const SplitSpec spec{"t", parse_range("0:199"), parse_range("200:299")};
    const auto a = split(ds, spec), b = split(ds, spec);
    EXPECT_EQ(ones(a.test), ones(b.test));
    std::size_t expect = 0;
    for (const auto& r : ds.rows) expect += (r.index >= 200 && r.theta == 1);
    EXPECT_EQ(ones(a.test), expect);
}

TEST(Split, ResolvesDates) {
    const auto r = one_session(std::vector<double>(30, 0.0));
    const auto idx = index_series(r);
    const auto range = resolve_dates(idx, idx[5].row.timestamp, idx[12].row.timestamp);
    EXPECT_EQ(range.first, 5);
    EXPECT_EQ(range.last, 12);
}

TEST(Csv, DatasetRoundTrip) {
    const auto ds = testsupport::separable_blobs(50, 10, 1.0, 0.0, 0.5, 3);
    std::stringstream ss;
    write_dataset_csv(ss, ds);
    const std::string text = ss.str();
    EXPECT_EQ(text.substr(0, text.find('\n')), "index,f1,f2,f3,f4,f5,f6,f7,f8,f9,f10,theta");
    const auto back = read_dataset_csv(ss);
    ASSERT_EQ(back.rows.size(), ds.rows.size());
    EXPECT_EQ(back.window_len, 10u);
    for (std::size_t i = 0; i < ds.rows.size(); ++i) {
        EXPECT_EQ(back.rows[i].index, ds.rows[i].index);
        EXPECT_EQ(back.rows[i].features, ds.rows[i].features);
        EXPECT_EQ(back.rows[i].theta, ds.rows[i].theta);
    }
    std::istringstream bad("index,f1,theta\n0,0.5,2\n");
    EXPECT_THROW(read_dataset_csv(bad), ParseError);
}

TEST(Config, Validation) {
    LabelingConfig cfg;
    EXPECT_NO_THROW(cfg.validate());
    cfg.K = 0.0;
    EXPECT_THROW(cfg.validate(), InvalidParameter);
    cfg = {};
    cfg.window_len = 0;
    EXPECT_THROW(cfg.validate(), InvalidParameter);
    EXPECT_EQ(parse_direction("both"), Direction::both);
    EXPECT_THROW(parse_direction("sideways"), ConfigError);
}
