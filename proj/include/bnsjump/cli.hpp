#pragma once

// Run configuration and subcommands behind the `bnsjump` executable.
//
// A run is described by an INI file with one section per stage ([run], [model], [grid], [simulate],
// [calendar], [preprocess], [stats], [realized], [labeling], [classifiers], [hp.<algorithm>],
// [split.<name>], [external.<name>]). Flags override file values. Every run writes its effective
// configuration to effective_config.ini in the output directory; running again from that file
// reproduces the outputs byte for byte.

#include "bnsjump/bns_model.hpp"
#include "bnsjump/classifiers.hpp"
#include "bnsjump/jump_labeling.hpp"
#include "bnsjump/market_data.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace bnsjump::cli {

enum class ExitCode : int {
    ok = 0,
    usage = 1,
    config = 2,
    io = 3,
    assertion = 4,
    data = 5,
};

/// Environment variable naming the default output root.
inline constexpr const char* kOutputRootEnv = "BNSJUMP_OUTPUT_ROOT";

/// Ranges are "a:b" (closed index range) or "FROM..TO" timestamps resolved through the index map.
struct SplitEntry {
    std::string name;
    std::string train;
    std::string test;
};

struct ExternalEntry {
    std::string name;
    std::string file;
    std::string split;  // empty: every split
};

struct RunConfig {
    // [run]
    std::uint64_t seed = 42;
    std::string input;
    std::string output;
    std::string index_map;

    // [model], [grid]
    bns::ModelParams model = default_model();
    levy::TimeGrid grid{0.0, 0.01, 100};

    // [simulate]
    std::size_t n_paths = 100;
    double noise_std = 0.0;
    bool brownian = true;
    double s0 = 100.0;
    std::size_t max_path_files = 10;
    bool emit_bars = false;
    std::string bars_start = "2021-01-04";

    // [calendar], [preprocess]
    market::SessionCalendar calendar = market::SessionCalendar::shanghai();
    market::PreprocessOptions preprocess;

    // [stats]
    int stats_interval = 1;
    bool stats_monthly = true;

    // [realized]
    int realized_interval = 5;
    market::RealizedWindow realized_window = market::RealizedWindow::day;

    // [labeling]
    int label_interval = 1;
    labeling::LabelingConfig labeling;

    // [classifiers], [hp.*], [split.*], [external.*]
    std::vector<ml::AlgorithmId> algorithms;
    std::map<ml::AlgorithmId, ml::Hyperparams> hyperparams;
    std::vector<SplitEntry> splits;
    std::vector<ExternalEntry> externals;

    static bns::ModelParams default_model();
};

/// Ordered "section.key" = value pairs.
using RawConfig = std::vector<std::pair<std::string, std::string>>;

RawConfig read_raw_config(std::istream& in);
/// Unknown sections or keys and malformed values raise ConfigError.
RunConfig parse_config(const RawConfig& raw);
/// Canonical INI carrying every setting, defaults included.
void write_config(std::ostream& out, const RunConfig& cfg);

/// A split file holds one section per split with `train` and `test` keys.
std::vector<SplitEntry> read_splits_file(std::istream& in);

struct Invocation {
    std::string command;
    std::string config_path;
    std::string splits_path;
    RawConfig overrides;  // applied after the config and splits files
    unsigned threads = 1;
};

/// Runs one subcommand: simulate, ingest, stats, label, train, report or pipeline. Progress goes to
/// `out`, diagnostics to `err`; the result is the process exit code.
int run(const Invocation& inv, std::ostream& out, std::ostream& err);

}  // namespace bnsjump::cli
