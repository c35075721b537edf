#include "bnsjump/cli.hpp"

#include "bnsjump/common.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <istream>
#include <ostream>
#include <set>

namespace bnsjump::cli {

namespace pt = boost::property_tree;

bns::ModelParams RunConfig::default_model() {
    bns::ModelParams p;
    p.mu = 0.0;
    p.beta = 0.0;
    p.rho = -0.5;
    p.lambda = 1.0;
    p.theta = 0.5;
    p.sigma0_sq = 0.04;
    p.spec_base = {1.0, 20.0};
    p.spec_strong = {5.0, 20.0};
    return p;
}

RawConfig read_raw_config(std::istream& in) {
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("malformed config: ") + e.message() + " (line " + std::to_string(e.line()) + ")");
    }
    RawConfig raw;
    for (const auto& [section, body] : tree) {
        if (body.empty()) throw ConfigError("config key '" + section + "' is outside any section");
        for (const auto& [key, value] : body) raw.emplace_back(section + "." + key, value.data());
    }
    return raw;
}

namespace {

bool parse_bool(const std::string& key, std::string_view v) {
    v = trim(v);
    if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
    if (v == "0" || v == "false" || v == "no" || v == "off") return false;
    throw ConfigError(key + " must be a boolean, got '" + std::string(v) + "'");
}

double parse_real(const std::string& key, std::string_view v) {
    try {
        return parse_double(v);
    } catch (const ParseError&) {
        throw ConfigError(key + " must be a number, got '" + std::string(trim(v)) + "'");
    }
}

long long parse_integer(const std::string& key, std::string_view v, long long min_value) {
    long long x = 0;
    try {
        x = parse_int(v);
    } catch (const ParseError&) {
        throw ConfigError(key + " must be an integer, got '" + std::string(trim(v)) + "'");
    }
    if (x < min_value) throw ConfigError(key + " must be at least " + std::to_string(min_value));
    return x;
}

std::vector<std::string> split_list(std::string_view v) {
    std::vector<std::string> out;
    while (true) {
        const auto comma = v.find(',');
        const auto item = trim(v.substr(0, comma));
        if (!item.empty()) out.emplace_back(item);
        if (comma == std::string_view::npos) break;
        v.remove_prefix(comma + 1);
    }
    return out;
}

std::pair<std::string, std::string> split_key(const std::string& full) {
    const auto dot = full.rfind('.');
    if (dot == std::string::npos) throw ConfigError("config key '" + full + "' needs a section");
    return {full.substr(0, dot), full.substr(dot + 1)};
}

std::string outlier_rule_name(market::OutlierRule r) { return r == market::OutlierRule::none ? "none" : "sigma"; }

SplitEntry& split_named(std::vector<SplitEntry>& splits, const std::string& name) {
    auto it = std::find_if(splits.begin(), splits.end(), [&](const SplitEntry& s) { return s.name == name; });
    if (it != splits.end()) return *it;
    splits.push_back({name, {}, {}});
    return splits.back();
}

ExternalEntry& external_named(std::vector<ExternalEntry>& ext, const std::string& name) {
    auto it = std::find_if(ext.begin(), ext.end(), [&](const ExternalEntry& e) { return e.name == name; });
    if (it != ext.end()) return *it;
    ext.push_back({name, {}, {}});
    return ext.back();
}

}  // namespace

RunConfig parse_config(const RawConfig& raw) {
    RunConfig c;
    c.algorithms.assign(ml::builtin_algorithms().begin(), ml::builtin_algorithms().end());
    for (auto id : ml::builtin_algorithms()) c.hyperparams.emplace(id, ml::Hyperparams::defaults(id));

    for (const auto& [full, value] : raw) {
        const auto [section, key] = split_key(full);
        const auto real = [&] { return parse_real(full, value); };
        const auto count = [&](long long min_value) { return parse_integer(full, value, min_value); };
        const auto flag = [&] { return parse_bool(full, value); };
        const auto text = [&] { return std::string(trim(value)); };
        const auto unknown = [&] { throw ConfigError("unknown config key '" + full + "'"); };

        if (section == "run") {
            if (key == "seed") c.seed = static_cast<std::uint64_t>(count(0));
            else if (key == "input") c.input = text();
            else if (key == "output") c.output = text();
            else if (key == "index_map") c.index_map = text();
            else unknown();
        } else if (section == "model") {
            auto& m = c.model;
            if (key == "mu") m.mu = real();
            else if (key == "beta") m.beta = real();
            else if (key == "rho") m.rho = real();
            else if (key == "lambda") m.lambda = real();
            else if (key == "theta") m.theta = real();
            else if (key == "sigma0_sq") m.sigma0_sq = real();
            else if (key == "nu_base") m.spec_base.intensity = real();
            else if (key == "a_base") m.spec_base.jump_rate = real();
            else if (key == "nu_strong") m.spec_strong.intensity = real();
            else if (key == "a_strong") m.spec_strong.jump_rate = real();
            else unknown();
        } else if (section == "grid") {
            if (key == "t0") c.grid.t0 = real();
            else if (key == "dt") c.grid.dt = real();
            else if (key == "n_steps") c.grid.n_steps = static_cast<std::size_t>(count(1));
            else unknown();
        } else if (section == "simulate") {
            if (key == "n_paths") c.n_paths = static_cast<std::size_t>(count(1));
            else if (key == "noise_std") c.noise_std = real();
            else if (key == "brownian") c.brownian = flag();
            else if (key == "s0") c.s0 = real();
            else if (key == "max_path_files") c.max_path_files = static_cast<std::size_t>(count(0));
            else if (key == "emit_bars") c.emit_bars = flag();
            else if (key == "bars_start") c.bars_start = text();
            else unknown();
        } else if (section == "calendar") {
            if (key == "timezone") {
                c.calendar.timezone = text();
            } else if (key == "sessions") {
                c.calendar.sessions.clear();
                try {
                    for (const auto& s : split_list(value)) c.calendar.sessions.push_back(market::parse_session(s));
                } catch (const Error& e) {
                    throw ConfigError(full + ": " + e.what());
                }
            } else {
                unknown();
            }
        } else if (section == "preprocess") {
            auto& p = c.preprocess;
            if (key == "trim_minutes") p.trim_minutes = static_cast<int>(count(0));
            else if (key == "trim_all_sessions") p.trim_all_sessions = flag();
            else if (key == "outlier_rule") {
                const auto v = text();
                if (v == "none") p.outliers.rule = market::OutlierRule::none;
                else if (v == "sigma") p.outliers.rule = market::OutlierRule::sigma;
                else throw ConfigError(full + " must be none or sigma");
            } else if (key == "sigma_multiple") p.outliers.sigma_multiple = real();
            else if (key == "min_changes") p.outliers.min_changes = static_cast<std::size_t>(count(2));
            else unknown();
        } else if (section == "stats") {
            if (key == "resample_minutes") c.stats_interval = static_cast<int>(count(1));
            else if (key == "monthly") c.stats_monthly = flag();
            else unknown();
        } else if (section == "realized") {
            if (key == "resample_minutes") c.realized_interval = static_cast<int>(count(1));
            else if (key == "window") {
                const auto v = text();
                if (v == "day") c.realized_window = market::RealizedWindow::day;
                else if (v == "month") c.realized_window = market::RealizedWindow::month;
                else throw ConfigError(full + " must be day or month");
            } else unknown();
        } else if (section == "labeling") {
            auto& l = c.labeling;
            if (key == "resample_minutes") c.label_interval = static_cast<int>(count(1));
            else if (key == "window_len") l.window_len = static_cast<std::size_t>(count(1));
            else if (key == "lookahead") l.lookahead = static_cast<std::size_t>(count(1));
            else if (key == "K") l.K = real();
            else if (key == "min_jumps") l.min_jumps = static_cast<std::size_t>(count(1));
            else if (key == "direction") l.direction = labeling::parse_direction(value);
            else if (key == "strict") l.strict = flag();
            else if (key == "stride") l.stride = static_cast<std::size_t>(count(1));
            else unknown();
        } else if (section == "classifiers") {
            if (key == "algorithms") {
                c.algorithms.clear();
                for (const auto& name : split_list(value)) {
                    if (name == "all") {
                        c.algorithms.insert(c.algorithms.end(), ml::builtin_algorithms().begin(), ml::builtin_algorithms().end());
                        continue;
                    }
                    const auto id = ml::parse_algorithm(name);
                    if (id == ml::AlgorithmId::external) throw ConfigError("external predictions go in [external.<name>] sections");
                    c.algorithms.push_back(id);
                }
            } else {
                unknown();
            }
        } else if (section.starts_with("hp.")) {
            const auto id = ml::parse_algorithm(section.substr(3));
            if (id == ml::AlgorithmId::external) throw ConfigError("external predictions take no hyperparameters");
            c.hyperparams.at(id).set(key, real());
        } else if (section.starts_with("split.")) {
            auto& s = split_named(c.splits, section.substr(6));
            if (key == "train") s.train = text();
            else if (key == "test") s.test = text();
            else unknown();
        } else if (section.starts_with("external.")) {
            auto& e = external_named(c.externals, section.substr(9));
            if (key == "file") e.file = text();
            else if (key == "split") e.split = text();
            else unknown();
        } else {
            throw ConfigError("unknown config section '" + section + "'");
        }
    }

    std::set<ml::AlgorithmId> seen;
    for (auto id : c.algorithms) {
        if (!seen.insert(id).second) throw ConfigError("algorithm " + std::string(ml::to_string(id)) + " listed twice");
    }
    for (const auto& e : c.externals) {
        if (e.file.empty()) throw ConfigError("external." + e.name + " needs a file");
    }
    try {
        c.calendar.validate();
        c.labeling.validate();
    } catch (const InvalidParameter& e) {
        throw ConfigError(e.what());
    }
    return c;
}

void write_config(std::ostream& out, const RunConfig& c) {
    const auto d = [](double v) { return format_double(v); };
    const auto b = [](bool v) { return v ? "true" : "false"; };
    out << "[run]\n";
    out << "seed = " << c.seed << '\n';
    out << "input = " << c.input << '\n';
    out << "output = " << c.output << '\n';
    out << "index_map = " << c.index_map << '\n';

    const auto& m = c.model;
    out << "\n[model]\n";
    out << "mu = " << d(m.mu) << "\nbeta = " << d(m.beta) << "\nrho = " << d(m.rho) << "\nlambda = " << d(m.lambda)
        << "\ntheta = " << d(m.theta) << "\nsigma0_sq = " << d(m.sigma0_sq) << "\nnu_base = " << d(m.spec_base.intensity)
        << "\na_base = " << d(m.spec_base.jump_rate) << "\nnu_strong = " << d(m.spec_strong.intensity)
        << "\na_strong = " << d(m.spec_strong.jump_rate) << '\n';

    out << "\n[grid]\n";
    out << "t0 = " << d(c.grid.t0) << "\ndt = " << d(c.grid.dt) << "\nn_steps = " << c.grid.n_steps << '\n';

    out << "\n[simulate]\n";
    out << "n_paths = " << c.n_paths << "\nnoise_std = " << d(c.noise_std) << "\nbrownian = " << b(c.brownian)
        << "\ns0 = " << d(c.s0) << "\nmax_path_files = " << c.max_path_files << "\nemit_bars = " << b(c.emit_bars)
        << "\nbars_start = " << c.bars_start << '\n';

    out << "\n[calendar]\n";
    out << "timezone = " << c.calendar.timezone << "\nsessions = ";
    for (std::size_t i = 0; i < c.calendar.sessions.size(); ++i) {
        out << (i ? ", " : "") << market::format_session(c.calendar.sessions[i]);
    }
    out << '\n';

    const auto& p = c.preprocess;
    out << "\n[preprocess]\n";
    out << "trim_minutes = " << p.trim_minutes << "\ntrim_all_sessions = " << b(p.trim_all_sessions)
        << "\noutlier_rule = " << outlier_rule_name(p.outliers.rule) << "\nsigma_multiple = " << d(p.outliers.sigma_multiple)
        << "\nmin_changes = " << p.outliers.min_changes << '\n';

    out << "\n[stats]\n";
    out << "resample_minutes = " << c.stats_interval << "\nmonthly = " << b(c.stats_monthly) << '\n';

    out << "\n[realized]\n";
    out << "resample_minutes = " << c.realized_interval
        << "\nwindow = " << (c.realized_window == market::RealizedWindow::day ? "day" : "month") << '\n';

    const auto& l = c.labeling;
    out << "\n[labeling]\n";
    out << "resample_minutes = " << c.label_interval << "\nwindow_len = " << l.window_len << "\nlookahead = " << l.lookahead
        << "\nK = " << d(l.K) << "\nmin_jumps = " << l.min_jumps << "\ndirection = " << labeling::to_string(l.direction)
        << "\nstrict = " << b(l.strict) << "\nstride = " << l.stride << '\n';

    out << "\n[classifiers]\n";
    out << "algorithms = ";
    for (std::size_t i = 0; i < c.algorithms.size(); ++i) out << (i ? ", " : "") << ml::to_string(c.algorithms[i]);
    out << '\n';

    for (const auto& [id, hp] : c.hyperparams) {
        out << "\n[hp." << ml::to_string(id) << "]\n";
        for (const auto& [key, value] : hp.values()) out << key << " = " << d(value) << '\n';
    }
    for (const auto& s : c.splits) {
        out << "\n[split." << s.name << "]\n";
        out << "train = " << s.train << "\ntest = " << s.test << '\n';
    }
    for (const auto& e : c.externals) {
        out << "\n[external." << e.name << "]\n";
        out << "file = " << e.file << "\nsplit = " << e.split << '\n';
    }
}

std::vector<SplitEntry> read_splits_file(std::istream& in) {
    std::vector<SplitEntry> splits;
    for (const auto& [full, value] : read_raw_config(in)) {
        const auto [section, key] = split_key(full);
        auto& s = split_named(splits, section.starts_with("split.") ? section.substr(6) : section);
        if (key == "train") s.train = std::string(trim(value));
        else if (key == "test") s.test = std::string(trim(value));
        else throw ConfigError("split files only take train and test keys, got '" + full + "'");
    }
    return splits;
}

}  // namespace bnsjump::cli
