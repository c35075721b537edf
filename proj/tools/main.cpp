#include "bnsjump/cli.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

int main(int argc, char** argv) {
    using bnsjump::cli::ExitCode;

    CLI::App app{"Generalized BN-S simulation and high-frequency jump-prediction toolkit"};
    app.require_subcommand(1);

    bnsjump::cli::Invocation inv;
    std::string input, output, index_map, train, test, algorithms;
    long long seed = -1;
    std::vector<std::string> sets;

    const std::vector<std::pair<std::string, std::string>> commands = {
        {"simulate", "simulate BN-S paths and write path CSVs plus summary.json"},
        {"ingest", "load minute bars, preprocess, write bars_clean.csv and ingest.json"},
        {"stats", "descriptive statistics and realized measures of a bar file"},
        {"label", "percent-change windows, big-jump marks and theta labels"},
        {"train", "train and score classifiers on a labelled dataset"},
        {"report", "score external prediction files on a labelled dataset"},
        {"pipeline", "ingest, stats, label, train and property checks in one run"},
    };
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("-c,--config", inv.config_path, "INI run configuration");
        sub->add_option("-i,--input", input, "input file (bars CSV or dataset CSV)");
        sub->add_option("-o,--output", output, "output directory");
        sub->add_option("--index-map", index_map, "index map written by `label`");
        sub->add_option("--seed", seed, "master seed")->check(CLI::NonNegativeNumber);
        sub->add_option("--threads", inv.threads, "worker threads (results do not depend on it)");
        sub->add_option("--splits", inv.splits_path, "split file with one [name] section per split");
        sub->add_option("--train", train, "train index range a:b (defines split 'cli')");
        sub->add_option("--test", test, "test index range c:d (defines split 'cli')");
        sub->add_option("--algorithms", algorithms, "comma-separated algorithm list or 'all'");
        sub->add_option("--set", sets, "override any config value: section.key=value");
        sub->callback([&inv, name = name] { inv.command = name; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : static_cast<int>(ExitCode::usage);
    }

    auto& ov = inv.overrides;
    if (!input.empty()) ov.emplace_back("run.input", input);
    if (!output.empty()) ov.emplace_back("run.output", output);
    if (!index_map.empty()) ov.emplace_back("run.index_map", index_map);
    if (seed >= 0) ov.emplace_back("run.seed", std::to_string(seed));
    if (!algorithms.empty()) ov.emplace_back("classifiers.algorithms", algorithms);
    for (const auto& s : sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) {
            std::cerr << "bnsjump: --set expects section.key=value, got '" << s << "'\n";
            return static_cast<int>(ExitCode::config);
        }
        ov.emplace_back(s.substr(0, eq), s.substr(eq + 1));
    }
    if (!train.empty() || !test.empty()) {
        ov.emplace_back("split.cli.train", train);
        ov.emplace_back("split.cli.test", test);
    }
    return bnsjump::cli::run(inv, std::cout, std::cerr);
}
