#pragma once

// Turns a percent-change series into a supervised dataset: rows of window_len consecutive returns,
// labelled theta = 1 when at least min_jumps big jumps follow within the lookahead horizon.

#include "bnsjump/market_data.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace bnsjump::labeling {

enum class Direction { down, up, both };

Direction parse_direction(std::string_view text);
std::string to_string(Direction d);

struct LabelingConfig {
    std::size_t window_len = 10;
    std::size_t lookahead = 10;
    double K = 0.1;  // percent units, same as ReturnSeries
    std::size_t min_jumps = 2;
    Direction direction = Direction::down;
    bool strict = false;     // compare with > K instead of >= K
    std::size_t stride = 1;  // spacing between consecutive anchors of a session

    void validate() const;
};

/// Tolerance (percent units) applied to inclusive threshold comparisons so that decimal prices such as
/// 100 -> 99.9 register as exactly K = 0.1.
inline constexpr double kThresholdTolerance = 1e-9;

struct IndexedReturn {
    std::int64_t index = 0;
    market::ReturnRow row;
};

/// Dense chronological index 0..n-1.
std::vector<IndexedReturn> index_series(const market::ReturnSeries& returns);

/// One flag per return row.
std::vector<bool> mark_big_jumps(const market::ReturnSeries& returns, const LabelingConfig& cfg);
bool is_big_jump(double pct_change, const LabelingConfig& cfg);

struct LabeledRow {
    std::int64_t index = 0;  // index of the anchor return (last element of the feature window)
    std::vector<double> features;
    int theta = 0;
};

struct LabeledDataset {
    std::size_t window_len = 10;
    std::size_t n_indexed = 0;  // length of the indexed series the rows were built from
    std::vector<LabeledRow> rows;
    std::vector<std::string> warnings;
};

/// Anchors i whose window [i-window_len+1, i] and horizon (i, i+lookahead] stay inside one session;
/// theta = 1 iff the horizon holds at least min_jumps marks.
LabeledDataset build_dataset(const std::vector<IndexedReturn>& returns, const std::vector<bool>& marks,
                             const LabelingConfig& cfg);

/// Closed index range [first, last].
struct IndexRange {
    std::int64_t first = 0;
    std::int64_t last = -1;

    bool empty() const noexcept { return last < first; }
    bool contains(std::int64_t i) const noexcept { return i >= first && i <= last; }
};

struct SplitSpec {
    std::string name;
    IndexRange train;
    IndexRange test;
};

/// Parses "a:b" (closed). An empty string is an empty range.
IndexRange parse_range(std::string_view text);
std::string format_range(const IndexRange& r);

struct SplitResult {
    LabeledDataset train;
    LabeledDataset test;
};

/// Partitions rows by inclusive index ranges. Ranges must lie in [0, n_indexed), and train must end
/// before test begins.
SplitResult split(const LabeledDataset& dataset, const SplitSpec& spec);

/// Resolves a timestamp range to the index range of returns inside it.
IndexRange resolve_dates(const std::vector<IndexedReturn>& returns, market::Timestamp from, market::Timestamp to);

/// `index,f1..fN,theta`.
void write_dataset_csv(std::ostream& out, const LabeledDataset& dataset);
LabeledDataset read_dataset_csv(std::istream& in);

/// `index,timestamp,pct_change,is_big_jump`.
void write_index_map_csv(std::ostream& out, const std::vector<IndexedReturn>& returns, const std::vector<bool>& marks);

}  // namespace bnsjump::labeling
