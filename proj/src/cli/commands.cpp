#include "bnsjump/cli.hpp"

#include "bnsjump/common.hpp"
#include "bnsjump/path_io.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

namespace bnsjump::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

struct Context {
    std::string stage = "config";
    std::ostream& out;
    std::ostream& err;
    unsigned threads = 1;
};

std::ifstream open_input(const std::string& path, const char* what) {
    if (path.empty()) throw ConfigError(std::string(what) + " path is required (run.input)");
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(std::string("cannot read ") + what + " '" + path + "'");
    return in;
}

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body) {
    std::error_code ec;
    if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory '" + path.parent_path().string() + "': " + ec.message());
    std::ostringstream buf;
    body(buf);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << buf.str();
    out.flush();
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

void write_json(const fs::path& path, const json& doc) {
    write_file(path, [&](std::ostream& o) { o << doc.dump(2) << '\n'; });
}

fs::path output_dir(const RunConfig& cfg, const std::string& command) {
    if (!cfg.output.empty()) return cfg.output;
    if (const char* root = std::getenv(kOutputRootEnv); root != nullptr && *root != '\0') return fs::path(root) / command;
    return fs::path("bnsjump_out") / command;
}

// ---------------------------------------------------------------------------------------------- simulate

json moment_check(const std::vector<double>& values, const levy::SubordinatorSpec& spec, double scale) {
    const double n = static_cast<double>(values.size());
    const double mean_exp = scale * spec.intensity / spec.jump_rate;
    const double var_exp = scale * 2.0 * spec.intensity / (spec.jump_rate * spec.jump_rate);
    // Fourth central moment of a compound Poisson sum with Exp(a) sizes: kappa4 + 3 var^2, kappa4 = 24 nu / a^4.
    const double mu4 = scale * 24.0 * spec.intensity / std::pow(spec.jump_rate, 4) + 3.0 * var_exp * var_exp;
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    var = values.size() > 1 ? var / (n - 1.0) : 0.0;
    const double se_mean = std::sqrt(var_exp / n);
    const double se_var = std::sqrt(std::max(mu4 - var_exp * var_exp, 0.0) / n);
    json j;
    j["expected_mean"] = mean_exp;
    j["sample_mean"] = mean;
    j["mean_standard_error"] = se_mean;
    j["mean_within_3se"] = se_mean == 0.0 ? mean == mean_exp : std::abs(mean - mean_exp) <= 3.0 * se_mean;
    j["expected_variance"] = var_exp;
    j["sample_variance"] = var;
    j["variance_standard_error"] = se_var;
    j["variance_within_3se"] = se_var == 0.0 ? var == var_exp : std::abs(var - var_exp) <= 3.0 * se_var;
    return j;
}

std::int32_t next_weekday(std::int32_t day) {
    // 1970-01-01 was a Thursday; (day + 4) % 7 == 0 is Sunday.
    while ((day + 4) % 7 == 0 || (day + 4) % 7 == 6) ++day;
    return day;
}

// Lays grid points on consecutive trading minutes: bars at open+1 .. close of each session, weekdays only.
market::BarSeries bars_from_path(const RunConfig& cfg, const std::vector<double>& prices) {
    market::BarSeries s;
    s.calendar = cfg.calendar;
    std::int32_t day = 0;
    try {
        day = market::day_number(market::parse_timestamp(cfg.bars_start + "T00:00:00"));
    } catch (const ParseError&) {
        throw ConfigError("simulate.bars_start must be a date YYYY-MM-DD");
    }
    day = next_weekday(day);
    std::size_t k = 0;
    while (k < prices.size()) {
        for (std::size_t si = 0; si < cfg.calendar.sessions.size() && k < prices.size(); ++si) {
            const auto& sess = cfg.calendar.sessions[si];
            for (int m = sess.open_minute + 1; m <= sess.close_minute && k < prices.size(); ++m, ++k) {
                const auto ts = market::Timestamp(std::chrono::seconds(static_cast<std::int64_t>(day) * 86400 + m * 60));
                s.rows.push_back({ts, prices[k], day, static_cast<std::uint32_t>(si)});
            }
        }
        day = next_weekday(day + 1);
    }
    return s;
}

void cmd_simulate(const RunConfig& cfg, Context& ctx, const fs::path& dir) {
    try {
        cfg.model.validate();
        cfg.grid.validate();
    } catch (const InvalidParameter& e) {
        throw ConfigError(e.what());
    }
    if (cfg.noise_std < 0.0) throw ConfigError("simulate.noise_std must be non-negative");
    if (!(cfg.s0 > 0.0)) throw ConfigError("simulate.s0 must be positive");

    ctx.stage = "simulate";
    bns::SimulationConfig sc;
    sc.grid = cfg.grid;
    sc.noise.std = cfg.noise_std;
    sc.log_price.brownian = cfg.brownian;
    sc.log_price.s0 = cfg.s0;
    const auto paths = bns::simulate_ensemble(cfg.model, sc, cfg.seed, cfg.n_paths, ctx.threads);

    ctx.stage = "write paths";
    const std::size_t n_files = std::min(cfg.max_path_files, paths.size());
    for (std::size_t i = 0; i < n_files; ++i) {
        write_file(dir / "paths" / fmt::format("path_{:05d}.csv", i),
                   [&](std::ostream& o) { bns::write_path_csv(o, paths[i].variance, paths[i].log_price); });
    }

    ctx.stage = "summary";
    double min_margin = std::numeric_limits<double>::infinity();
    std::vector<double> z_end, zb_end, x_end, v_end;
    double events_base = 0.0, events_strong = 0.0;
    for (const auto& p : paths) {
        for (std::size_t k = 0; k < p.variance.values.size(); ++k) {
            min_margin = std::min(min_margin, p.variance.values[k] - bns::VariancePath::floor_at(cfg.model, cfg.grid, k));
        }
        z_end.push_back(p.z.cumulative.back());
        zb_end.push_back(p.zb.cumulative.back());
        x_end.push_back(p.log_price.x_true.back());
        v_end.push_back(p.variance.values.back());
        events_base += static_cast<double>(p.z.events.size());
        events_strong += static_cast<double>(p.zb.events.size());
    }
    const double n = static_cast<double>(paths.size());
    const auto mean_of = [&](const std::vector<double>& v) {
        double s = 0.0;
        for (double x : v) s += x;
        return s / n;
    };
    const double scale = cfg.model.lambda * cfg.grid.horizon();

    json doc;
    doc["n_paths"] = cfg.n_paths;
    doc["seed"] = cfg.seed;
    doc["horizon"] = cfg.grid.horizon();
    doc["variance_floor"] = {{"min_margin", min_margin}, {"satisfied", min_margin >= -1e-12}};
    json moments;
    moments["base"] = moment_check(z_end, cfg.model.spec_base, scale);
    moments["strong"] = moment_check(zb_end, cfg.model.spec_strong, scale);
    doc["subordinator_moments"] = moments;
    doc["jumps"] = {{"mean_events_base", events_base / n}, {"mean_events_strong", events_strong / n}};
    doc["terminal"] = {{"mean_x_true", mean_of(x_end)}, {"mean_sigma_sq", mean_of(v_end)}};
    doc["instantaneous_variance_rate_at_sigma0"] = bns::instantaneous_variance_rate(cfg.model, cfg.model.sigma0_sq);
    doc["path_files"] = n_files;
    write_json(dir / "summary.json", doc);

    if (cfg.emit_bars && !paths.empty()) {
        ctx.stage = "emit bars";
        const auto prices = bns::price_series(paths.front().log_price, false);
        const auto bars = bars_from_path(cfg, prices);
        write_file(dir / "bars.csv", [&](std::ostream& o) { market::write_bars(o, bars); });
    }
    ctx.out << fmt::format("simulated {} paths into {}\n", cfg.n_paths, dir.string());
}

// ---------------------------------------------------------------------------------------------- market stages

market::BarSeries load_input_bars(const RunConfig& cfg, Context& ctx, std::size_t* rejected) {
    ctx.stage = "load bars";
    auto in = open_input(cfg.input, "bars file");
    auto loaded = market::load_bars(in, cfg.calendar);
    if (rejected) *rejected = loaded.rejected_outside_session;
    return std::move(loaded.series);
}

market::PreprocessResult run_ingest(const RunConfig& cfg, Context& ctx, const fs::path& dir) {
    std::size_t rejected = 0;
    const auto raw = load_input_bars(cfg, ctx, &rejected);
    ctx.stage = "preprocess";
    auto result = market::preprocess(raw, cfg.preprocess);
    ctx.stage = "write ingest";
    write_file(dir / "bars_clean.csv", [&](std::ostream& o) { market::write_bars(o, result.series); });
    json doc;
    doc["rows_read"] = raw.rows.size() + rejected;
    doc["rejected_outside_session"] = rejected;
    doc["total"] = result.total;
    doc["removed_trim"] = result.removed_trim;
    doc["removed_nonpositive"] = result.removed_nonpositive;
    doc["removed_outliers"] = result.removed_outliers;
    doc["retained"] = result.series.rows.size();
    doc["rejection_rate"] = result.rejection_rate;
    write_json(dir / "ingest.json", doc);
    ctx.out << fmt::format("retained {} of {} bars (rejection rate {:.4f})\n", result.series.rows.size(), result.total,
                           result.rejection_rate);
    return result;
}

struct StatsOutput {
    std::vector<market::StatsReport> stats;
    std::vector<market::RealizedRow> realized;
};

StatsOutput run_stats(const RunConfig& cfg, Context& ctx, const market::BarSeries& bars, const fs::path& dir) {
    StatsOutput s;
    ctx.stage = "stats";
    std::vector<std::string> notes;
    const auto sampled = market::resample(bars, cfg.stats_interval);
    s.stats = market::descriptive_stats(sampled, market::GroupBy::overall, &notes);
    if (cfg.stats_monthly) {
        auto monthly = market::descriptive_stats(sampled, market::GroupBy::month, &notes);
        s.stats.insert(s.stats.end(), monthly.begin(), monthly.end());
    }
    for (const auto& n : notes) ctx.err << "note: " << n << '\n';

    ctx.stage = "realized measures";
    const auto returns = market::pct_change(market::resample(bars, cfg.realized_interval));
    s.realized = market::realized_measures(returns, cfg.realized_window);

    ctx.stage = "write stats";
    write_file(dir / "stats.csv", [&](std::ostream& o) { market::write_stats_csv(o, s.stats); });
    write_file(dir / "stats.json", [&](std::ostream& o) { market::write_stats_json(o, s.stats); });
    write_file(dir / "realized.csv", [&](std::ostream& o) { market::write_realized_csv(o, s.realized); });
    write_file(dir / "realized.json", [&](std::ostream& o) { market::write_realized_json(o, s.realized); });
    return s;
}

struct LabelOutput {
    std::vector<labeling::IndexedReturn> indexed;
    std::vector<bool> marks;
    labeling::LabeledDataset dataset;
};

LabelOutput run_label(const RunConfig& cfg, Context& ctx, const market::BarSeries& bars, const fs::path& dir) {
    LabelOutput l;
    ctx.stage = "label";
    const auto returns = market::pct_change(market::resample(bars, cfg.label_interval));
    l.indexed = labeling::index_series(returns);
    l.marks = labeling::mark_big_jumps(returns, cfg.labeling);
    l.dataset = labeling::build_dataset(l.indexed, l.marks, cfg.labeling);
    for (const auto& w : l.dataset.warnings) ctx.err << "warning: " << w << '\n';

    ctx.stage = "write dataset";
    write_file(dir / "dataset.csv", [&](std::ostream& o) { labeling::write_dataset_csv(o, l.dataset); });
    write_file(dir / "index_map.csv", [&](std::ostream& o) { labeling::write_index_map_csv(o, l.indexed, l.marks); });
    std::size_t ones = 0;
    for (const auto& r : l.dataset.rows) ones += r.theta == 1 ? 1 : 0;
    json doc;
    doc["n_returns"] = l.indexed.size();
    doc["n_marks"] = static_cast<std::size_t>(std::count(l.marks.begin(), l.marks.end(), true));
    doc["n_rows"] = l.dataset.rows.size();
    doc["theta_0"] = l.dataset.rows.size() - ones;
    doc["theta_1"] = ones;
    doc["warnings"] = l.dataset.warnings;
    write_json(dir / "label.json", doc);
    ctx.out << fmt::format("labelled {} rows ({} with theta = 1) from {} returns\n", l.dataset.rows.size(), ones,
                           l.indexed.size());
    return l;
}

// ---------------------------------------------------------------------------------------------- train / report

std::vector<labeling::IndexedReturn> read_index_map(std::istream& in) {
    std::vector<labeling::IndexedReturn> out;
    std::string line;
    std::size_t line_no = 1;
    if (!std::getline(in, line) || trim(line) != "index,timestamp,pct_change,is_big_jump") {
        throw ParseError("expected header index,timestamp,pct_change,is_big_jump", line_no);
    }
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view rest = trim(line);
        if (rest.empty()) continue;
        std::vector<std::string_view> f;
        while (true) {
            const auto comma = rest.find(',');
            f.push_back(rest.substr(0, comma));
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        if (f.size() != 4) throw ParseError("expected 4 fields", line_no);
        labeling::IndexedReturn r;
        r.index = parse_int(f[0], line_no);
        r.row.timestamp = market::parse_timestamp(f[1], line_no);
        r.row.pct_change = parse_double(f[2], line_no);
        r.row.day = market::day_number(r.row.timestamp);
        out.push_back(r);
    }
    return out;
}

labeling::IndexRange resolve_range(const std::string& text, const std::vector<labeling::IndexedReturn>* map,
                                   const std::string& what) {
    const auto dots = text.find("..");
    if (dots == std::string::npos) return labeling::parse_range(text);
    if (map == nullptr) throw ConfigError(what + " uses dates but no index map is available (run.index_map)");
    market::Timestamp from, to;
    try {
        from = market::parse_timestamp(trim(std::string_view(text).substr(0, dots)));
        to = market::parse_timestamp(trim(std::string_view(text).substr(dots + 2)));
    } catch (const ParseError& e) {
        throw ConfigError(what + ": " + e.what());
    }
    const auto r = labeling::resolve_dates(*map, from, to);
    if (r.empty()) throw ConfigError(what + " '" + text + "' contains no indexed returns");
    return r;
}

std::vector<labeling::SplitSpec> resolve_splits(const RunConfig& cfg, std::size_t n_indexed,
                                                const std::vector<labeling::IndexedReturn>* map) {
    std::vector<labeling::SplitSpec> out;
    if (cfg.splits.empty()) {
        // Chronological 80/20 split over the indexed series.
        const auto n = static_cast<std::int64_t>(n_indexed);
        const std::int64_t cut = n * 4 / 5;
        if (cut < 1 || cut >= n) throw ConfigError("too few indexed returns for the default split; configure [split.*]");
        out.push_back({"all", {0, cut - 1}, {cut, n - 1}});
        return out;
    }
    for (const auto& s : cfg.splits) {
        out.push_back({s.name, resolve_range(s.train, map, "split." + s.name + ".train"),
                       resolve_range(s.test, map, "split." + s.name + ".test")});
    }
    return out;
}

std::vector<ml::ExternalPredictions> load_externals(const RunConfig& cfg) {
    std::vector<ml::ExternalPredictions> out;
    for (const auto& e : cfg.externals) {
        std::ifstream in(e.file, std::ios::binary);
        if (!in) throw IoError("cannot read external predictions '" + e.file + "'");
        out.push_back(ml::read_predictions_csv(in, e.name, e.split));
    }
    return out;
}

std::string safe_name(std::string s) {
    for (auto& c : s) {
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.')) c = '_';
    }
    return s;
}

void write_benchmark(const RunConfig& cfg, const ml::BenchmarkTable& table,
                     const std::vector<labeling::SplitSpec>& splits, const fs::path& dir) {
    write_file(dir / "report.txt", [&](std::ostream& o) { ml::write_report_text(o, table); });
    for (const auto& s : splits) {
        write_file(dir / fmt::format("report_{}.csv", safe_name(s.name)),
                   [&](std::ostream& o) { ml::write_report_csv(o, table, s.name); });
    }
    json models = json::array();
    for (const auto& cell : table.cells) {
        write_file(dir / "predictions" / safe_name(cell.split) / (safe_name(cell.algorithm) + ".csv"),
                   [&](std::ostream& o) { ml::write_predictions_csv(o, cell.index, cell.predictions); });
        json m;
        m["split"] = cell.split;
        m["algorithm"] = cell.algorithm;
        if (cell.info) {
            m["seed"] = cell.info->seed;
            m["train_rows"] = cell.info->rows;
            m["feature_width"] = cell.info->width;
            m["degenerate"] = cell.info->degenerate;
            m["warnings"] = cell.info->warnings;
            const auto id = ml::parse_algorithm(cell.algorithm);
            json hp;
            for (const auto& [k, v] : cfg.hyperparams.at(id).values()) hp[k] = v;
            m["hyperparams"] = hp;
        } else {
            m["external"] = true;
        }
        json classes = json::array();
        for (const auto& c : cell.report.classes) {
            classes.push_back({{"precision", c.precision},
                               {"recall", c.recall},
                               {"f1", c.f1},
                               {"support", c.support},
                               {"precision_undefined", c.precision_undefined},
                               {"recall_undefined", c.recall_undefined},
                               {"f1_undefined", c.f1_undefined}});
        }
        m["classes"] = classes;
        m["accuracy"] = cell.report.accuracy;
        models.push_back(m);
    }
    write_json(dir / "models.json", models);
}

struct DatasetInput {
    labeling::LabeledDataset dataset;
    std::optional<std::vector<labeling::IndexedReturn>> map;
};

DatasetInput load_dataset(const RunConfig& cfg, Context& ctx) {
    DatasetInput d;
    ctx.stage = "load dataset";
    auto in = open_input(cfg.input, "dataset file");
    d.dataset = labeling::read_dataset_csv(in);
    if (!cfg.index_map.empty()) {
        ctx.stage = "load index map";
        std::ifstream mi(cfg.index_map, std::ios::binary);
        if (!mi) throw IoError("cannot read index map '" + cfg.index_map + "'");
        d.map = read_index_map(mi);
        if (!d.dataset.rows.empty() && d.dataset.rows.back().index >= static_cast<std::int64_t>(d.map->size())) {
            throw InvalidParameter("dataset indices exceed the index map");
        }
        d.dataset.n_indexed = d.map->size();
    }
    return d;
}

ml::BenchmarkTable run_train(const RunConfig& cfg, Context& ctx, const labeling::LabeledDataset& dataset,
                             const std::vector<labeling::IndexedReturn>* map, const fs::path& dir,
                             std::vector<labeling::SplitSpec>* resolved = nullptr) {
    ctx.stage = "resolve splits";
    const auto splits = resolve_splits(cfg, dataset.n_indexed, map);
    ctx.stage = "load externals";
    ml::BenchmarkOptions opts;
    opts.seed = cfg.seed;
    opts.threads = ctx.threads;
    opts.hyperparams = cfg.hyperparams;
    opts.externals = load_externals(cfg);
    ctx.stage = "train";
    const auto table = ml::run_benchmark(dataset, splits, cfg.algorithms, opts);
    ctx.stage = "write report";
    write_benchmark(cfg, table, splits, dir);
    ctx.out << fmt::format("scored {} cells over {} splits\n", table.cells.size(), splits.size());
    if (resolved) *resolved = splits;
    return table;
}

void cmd_report(const RunConfig& cfg, Context& ctx, const fs::path& dir) {
    if (cfg.externals.empty()) throw ConfigError("report needs at least one [external.<name>] section");
    auto in = load_dataset(cfg, ctx);
    ctx.stage = "resolve splits";
    const auto splits = resolve_splits(cfg, in.dataset.n_indexed, in.map ? &*in.map : nullptr);
    ctx.stage = "score";
    const auto externals = load_externals(cfg);
    ml::BenchmarkTable table;
    for (const auto& s : splits) {
        const auto part = labeling::split(in.dataset, s);
        for (const auto& e : externals) {
            if (e.split.empty() || e.split == s.name) table.cells.push_back(ml::score_external(part.test, e, s.name));
        }
    }
    ctx.stage = "write report";
    write_benchmark(cfg, table, splits, dir);
}

// ---------------------------------------------------------------------------------------------- pipeline checks

struct Checks {
    json list = json::array();
    bool all = true;

    void add(const std::string& name, bool passed, const std::string& detail = {}) {
        list.push_back({{"name", name}, {"passed", passed}, {"detail", detail}});
        all = all && passed;
    }
};

Checks pipeline_checks(const RunConfig& cfg, const market::PreprocessResult& pre, const StatsOutput& st,
                       const LabelOutput& lab, const ml::BenchmarkTable& table) {
    Checks c;
    c.add("rejection_rate_in_unit_interval", pre.rejection_rate >= 0.0 && pre.rejection_rate <= 1.0);

    {
        const auto again = market::preprocess(pre.series, cfg.preprocess);
        c.add("preprocess_idempotent", again.series == pre.series);
    }

    {
        bool ok = true;
        for (const auto& r : lab.indexed) {
            const auto s = cfg.calendar.session_of(market::second_of_day(r.row.timestamp));
            ok = ok && s && *s == r.row.session && market::day_number(r.row.timestamp) == r.row.day;
        }
        c.add("returns_inside_sessions", ok);
    }

    {
        bool ok = true;
        for (const auto& r : st.realized) {
            ok = ok && r.realized_volatility >= 0.0;
            if (r.bipower_variation) {
                ok = ok && *r.bipower_variation >= 0.0 && r.jump_component &&
                     *r.jump_component == std::max(r.realized_volatility - *r.bipower_variation, 0.0);
            }
        }
        c.add("realized_measures_consistent", ok);
    }

    {
        bool stats_ok = true;
        for (const auto& s : st.stats) stats_ok = stats_ok && s.min <= s.median && s.median <= s.max && s.count > 0;
        c.add("stats_ordered", stats_ok);
    }

    {
        // Recount every label directly from the marks.
        const auto& cfgl = cfg.labeling;
        std::size_t mismatches = 0;
        for (const auto& row : lab.dataset.rows) {
            const auto i = static_cast<std::size_t>(row.index);
            bool same_session = i + cfgl.lookahead < lab.indexed.size() && i + 1 >= cfgl.window_len;
            std::size_t count = 0;
            for (std::size_t j = i + 1 - std::min(i + 1, cfgl.window_len); same_session && j <= i + cfgl.lookahead; ++j) {
                same_session = lab.indexed[j].row.day == lab.indexed[i].row.day &&
                               lab.indexed[j].row.session == lab.indexed[i].row.session;
                if (j > i && lab.marks[j]) ++count;
            }
            bool features_ok = same_session && row.features.size() == cfgl.window_len;
            for (std::size_t k = 0; features_ok && k < cfgl.window_len; ++k) {
                features_ok = row.features[k] == lab.indexed[i + 1 - cfgl.window_len + k].row.pct_change;
            }
            const int theta = count >= cfgl.min_jumps ? 1 : 0;
            if (!features_ok || theta != row.theta) ++mismatches;
        }
        c.add("labels_match_recount", mismatches == 0, fmt::format("{} mismatches", mismatches));
    }

    {
        bool sums = true, harmonic = true, accuracy = true, constant = true;
        for (const auto& cell : table.cells) {
            const auto& r = cell.report;
            sums = sums && r.classes[0].support + r.classes[1].support == cell.predictions.size();
            for (const auto& k : r.classes) {
                if (k.precision + k.recall > 0.0) {
                    harmonic = harmonic && std::abs(k.f1 - 2.0 * k.precision * k.recall / (k.precision + k.recall)) <= 1e-12;
                }
            }
            if (r.total > 0) {
                const double micro = static_cast<double>(r.classes[0].true_positive + r.classes[1].true_positive) /
                                     static_cast<double>(r.total);
                accuracy = accuracy && std::abs(micro - r.accuracy) <= 1e-12;
            }
            for (const auto& other : table.cells) {
                if (other.split == cell.split) {
                    constant = constant && other.report.classes[0].support == r.classes[0].support &&
                               other.report.classes[1].support == r.classes[1].support;
                }
            }
        }
        c.add("support_sums_to_test_size", sums);
        c.add("f1_is_harmonic_mean", harmonic);
        c.add("accuracy_equals_micro_recall", accuracy);
        c.add("supports_constant_within_split", constant);
    }
    return c;
}

void cmd_pipeline(const RunConfig& cfg, Context& ctx, const fs::path& dir) {
    const auto pre = run_ingest(cfg, ctx, dir);
    const auto st = run_stats(cfg, ctx, pre.series, dir);
    const auto lab = run_label(cfg, ctx, pre.series, dir);
    if (lab.dataset.rows.empty()) throw InvalidParameter("labelled dataset is empty; nothing to train on");
    const auto table = run_train(cfg, ctx, lab.dataset, &lab.indexed, dir);

    ctx.stage = "checks";
    const auto checks = pipeline_checks(cfg, pre, st, lab, table);
    json doc;
    doc["all_passed"] = checks.all;
    doc["checks"] = checks.list;
    write_json(dir / "checks.json", doc);
    if (!checks.all) {
        std::string failed;
        for (const auto& c : checks.list) {
            if (!c["passed"].get<bool>()) failed += (failed.empty() ? "" : ", ") + c["name"].get<std::string>();
        }
        throw AssertionFailure("pipeline checks failed: " + failed);
    }
    ctx.out << "all pipeline checks passed\n";
}

RunConfig load_run_config(const Invocation& inv) {
    RawConfig raw;
    if (!inv.config_path.empty()) {
        std::ifstream in(inv.config_path, std::ios::binary);
        if (!in) throw IoError("cannot read config '" + inv.config_path + "'");
        raw = read_raw_config(in);
    }
    if (!inv.splits_path.empty()) {
        std::ifstream in(inv.splits_path, std::ios::binary);
        if (!in) throw IoError("cannot read splits file '" + inv.splits_path + "'");
        const auto splits = read_splits_file(in);
        // A splits file replaces any splits from the config.
        std::erase_if(raw, [](const auto& kv) { return kv.first.starts_with("split."); });
        for (const auto& s : splits) {
            raw.emplace_back("split." + s.name + ".train", s.train);
            raw.emplace_back("split." + s.name + ".test", s.test);
        }
    }
    // Flag-provided splits replace file splits too.
    if (std::any_of(inv.overrides.begin(), inv.overrides.end(), [](const auto& kv) { return kv.first.starts_with("split."); })) {
        std::erase_if(raw, [](const auto& kv) { return kv.first.starts_with("split."); });
    }
    raw.insert(raw.end(), inv.overrides.begin(), inv.overrides.end());
    return parse_config(raw);
}

}  // namespace

int run(const Invocation& inv, std::ostream& out, std::ostream& err) {
    Context ctx{"config", out, err, inv.threads};
    const auto fail = [&](const char* kind, const std::exception& e, ExitCode code) {
        err << "bnsjump " << inv.command << ": " << kind << " in stage '" << ctx.stage << "': " << e.what() << '\n';
        return static_cast<int>(code);
    };
    static const std::vector<std::string> commands = {"simulate", "ingest", "stats", "label", "train", "report", "pipeline"};
    if (std::find(commands.begin(), commands.end(), inv.command) == commands.end()) {
        err << "bnsjump: unknown subcommand '" << inv.command << "'\n";
        return static_cast<int>(ExitCode::usage);
    }
    try {
        const RunConfig cfg = load_run_config(inv);
        const fs::path dir = output_dir(cfg, inv.command);
        write_file(dir / "effective_config.ini", [&](std::ostream& o) { write_config(o, cfg); });

        if (inv.command == "simulate") {
            cmd_simulate(cfg, ctx, dir);
        } else if (inv.command == "ingest") {
            run_ingest(cfg, ctx, dir);
        } else if (inv.command == "stats") {
            const auto bars = load_input_bars(cfg, ctx, nullptr);
            run_stats(cfg, ctx, bars, dir);
        } else if (inv.command == "label") {
            const auto bars = load_input_bars(cfg, ctx, nullptr);
            run_label(cfg, ctx, bars, dir);
        } else if (inv.command == "train") {
            const auto in = load_dataset(cfg, ctx);
            run_train(cfg, ctx, in.dataset, in.map ? &*in.map : nullptr, dir);
        } else if (inv.command == "report") {
            cmd_report(cfg, ctx, dir);
        } else {
            cmd_pipeline(cfg, ctx, dir);
        }
        return static_cast<int>(ExitCode::ok);
    } catch (const ConfigError& e) {
        return fail("config error", e, ExitCode::config);
    } catch (const IoError& e) {
        return fail("I/O error", e, ExitCode::io);
    } catch (const AssertionFailure& e) {
        return fail("assertion failed", e, ExitCode::assertion);
    } catch (const Error& e) {
        return fail("error", e, ExitCode::data);
    } catch (const std::exception& e) {
        return fail("unexpected error", e, ExitCode::data);
    }
}

}  // namespace bnsjump::cli
