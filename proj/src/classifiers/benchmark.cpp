#include "bnsjump/classifiers.hpp"

#include "bnsjump/common.hpp"

namespace bnsjump::ml {

namespace {

std::vector<std::int64_t> indices_of(const labeling::LabeledDataset& ds) {
    std::vector<std::int64_t> idx;
    idx.reserve(ds.rows.size());
    for (const auto& r : ds.rows) idx.push_back(r.index);
    return idx;
}

}  // namespace

BenchmarkCell score_external(const labeling::LabeledDataset& test_set, const ExternalPredictions& ext,
                             const std::string& split_name) {
    BenchmarkCell cell;
    cell.split = split_name;
    cell.algorithm = ext.name;
    cell.index = indices_of(test_set);
    cell.predictions.reserve(test_set.rows.size());
    for (const auto& row : test_set.rows) {
        auto it = ext.labels.find(row.index);
        if (it == ext.labels.end()) {
            throw InvalidParameter("predictions '" + ext.name + "' have no label for index " + std::to_string(row.index) +
                                   " of split " + split_name);
        }
        cell.predictions.push_back(it->second);
    }
    const auto truth = labels_of(test_set);
    cell.report = evaluate(cell.predictions, truth);
    return cell;
}

BenchmarkTable run_benchmark(const labeling::LabeledDataset& dataset, const std::vector<labeling::SplitSpec>& splits,
                             const std::vector<AlgorithmId>& ids, const BenchmarkOptions& opts) {
    std::vector<labeling::SplitResult> parts;
    parts.reserve(splits.size());
    for (const auto& s : splits) parts.push_back(labeling::split(dataset, s));

    for (AlgorithmId id : ids) {
        if (id == AlgorithmId::external) throw InvalidParameter("external predictions are passed through options");
    }

    const std::size_t n_cells = splits.size() * ids.size();
    std::vector<BenchmarkCell> trained(n_cells);
    // Cells run concurrently; each one trains single-threaded so results do not depend on `threads`.
    parallel_for(n_cells, opts.threads, [&](std::size_t c) {
        const std::size_t si = c / ids.size(), ai = c % ids.size();
        const AlgorithmId id = ids[ai];
        const auto& part = parts[si];
        if (part.train.rows.empty()) throw InvalidParameter("split " + splits[si].name + " has an empty training set");
        auto hp_it = opts.hyperparams.find(id);
        const Hyperparams hp = hp_it != opts.hyperparams.end() ? hp_it->second : Hyperparams::defaults(id);
        const std::uint64_t seed = derive_seed(derive_seed(opts.seed, si, Stream::classifier), ai, Stream::classifier);
        const Model model = train(id, part.train, hp, seed, 1);

        BenchmarkCell& cell = trained[c];
        cell.split = splits[si].name;
        cell.algorithm = std::string(to_string(id));
        cell.info = model.info();
        cell.index = indices_of(part.test);
        cell.predictions = model.predict(features_of(part.test)).labels;
        const auto truth = labels_of(part.test);
        cell.report = evaluate(cell.predictions, truth);
    });

    BenchmarkTable table;
    for (std::size_t si = 0; si < splits.size(); ++si) {
        for (std::size_t ai = 0; ai < ids.size(); ++ai) table.cells.push_back(std::move(trained[si * ids.size() + ai]));
        for (const auto& ext : opts.externals) {
            if (ext.split.empty() || ext.split == splits[si].name) {
                table.cells.push_back(score_external(parts[si].test, ext, splits[si].name));
            }
        }
    }

    for (std::size_t a = 0; a < table.cells.size(); ++a) {
        for (std::size_t b = a + 1; b < table.cells.size(); ++b) {
            const auto& x = table.cells[a];
            const auto& y = table.cells[b];
            if (x.split != y.split) continue;
            for (int c = 0; c < 2; ++c) {
                if (x.report.classes[c].support != y.report.classes[c].support) {
                    throw AssertionFailure("support of class " + std::to_string(c) + " differs between " + x.algorithm +
                                           " and " + y.algorithm + " on split " + x.split);
                }
            }
        }
    }
    return table;
}

}  // namespace bnsjump::ml
