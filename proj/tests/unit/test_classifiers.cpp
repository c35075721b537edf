#include "bnsjump/classifiers.hpp"
#include "bnsjump/common.hpp"

#include "../support/fixtures.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace bnsjump;
using namespace bnsjump::ml;
using labeling::LabeledDataset;
using labeling::parse_range;
using labeling::SplitSpec;

namespace {

LabeledDataset transform(const LabeledDataset& ds) {
    auto out = ds;
    for (auto& row : out.rows) {
        for (std::size_t j = 0; j < row.features.size(); ++j) {
            double& f = row.features[j];
            f = j % 2 == 0 ? std::exp(f) : f * f * f + 2.0 * f;
        }
    }
    return out;
}

LabeledDataset rows(const LabeledDataset& ds, std::size_t first, std::size_t last) {
    LabeledDataset out = ds;
    out.rows.assign(ds.rows.begin() + static_cast<std::ptrdiff_t>(first), ds.rows.begin() + static_cast<std::ptrdiff_t>(last));
    return out;
}

}  // namespace

TEST(Evaluate, PerfectPredictions) {
    const std::vector<int> y{0, 0, 1, 1};
    const auto r = evaluate(y, y);
    for (const auto& c : r.classes) {
        EXPECT_EQ(c.precision, 1.0);
        EXPECT_EQ(c.recall, 1.0);
        EXPECT_EQ(c.f1, 1.0);
        EXPECT_EQ(c.support, 2u);
    }
    EXPECT_EQ(r.accuracy, 1.0);
}

TEST(Evaluate, HandConfusionMatrix) {
    const std::vector<int> truth{0, 0, 0, 1, 1}, pred{0, 1, 0, 1, 0};
    const auto r = evaluate(pred, truth);
    EXPECT_DOUBLE_EQ(r.classes[0].precision, 2.0 / 3.0);
    EXPECT_DOUBLE_EQ(r.classes[0].recall, 2.0 / 3.0);
    EXPECT_DOUBLE_EQ(r.classes[1].precision, 0.5);
    EXPECT_DOUBLE_EQ(r.classes[1].recall, 0.5);
    EXPECT_EQ(r.classes[0].support, 3u);
    EXPECT_EQ(r.classes[1].support, 2u);
    EXPECT_DOUBLE_EQ(r.accuracy, 0.6);
}

TEST(Evaluate, AllOnesOnImbalancedSplit) {
    std::vector<int> truth(37, 0);
    truth.resize(330, 1);
    const std::vector<int> pred(330, 1);
    const auto r = evaluate(pred, truth);
    EXPECT_DOUBLE_EQ(r.classes[1].precision, 293.0 / 330.0);
    EXPECT_EQ(r.classes[1].recall, 1.0);
    EXPECT_NEAR(r.classes[1].f1, 0.94, 0.005);
    EXPECT_EQ(r.classes[0].precision, 0.0);
    EXPECT_TRUE(r.classes[0].precision_undefined);
    EXPECT_EQ(r.classes[0].recall, 0.0);
    EXPECT_FALSE(r.classes[0].recall_undefined);
    EXPECT_TRUE(r.classes[0].f1_undefined);
    EXPECT_THROW(evaluate(std::vector<int>{1}, truth), InvalidParameter);
}

TEST(Evaluate, ReportIdentitiesOnRandomData) {
    std::mt19937_64 rng(8);
    std::bernoulli_distribution coin(0.3);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<int> t(50), p(50);
        for (int i = 0; i < 50; ++i) {
            t[i] = coin(rng);
            p[i] = coin(rng);
        }
        const auto r = evaluate(p, t);
        EXPECT_EQ(r.classes[0].support + r.classes[1].support, 50u);
        const double micro_recall =
            static_cast<double>(r.classes[0].true_positive + r.classes[1].true_positive) / 50.0;
        EXPECT_DOUBLE_EQ(micro_recall, r.accuracy);
        for (const auto& c : r.classes) {
            if (c.precision + c.recall > 0) {
                EXPECT_NEAR(c.f1, 2 * c.precision * c.recall / (c.precision + c.recall), 1e-12);
            }
            for (double v : {c.precision, c.recall, c.f1}) {
                EXPECT_GE(v, 0.0);
                EXPECT_LE(v, 1.0);
            }
        }
    }
}

TEST(Threshold, NeuralNetRule) {
    EXPECT_EQ(threshold_label(0.31, kNeuralNetThreshold), 1);
    EXPECT_EQ(threshold_label(0.29, kNeuralNetThreshold), 0);
    EXPECT_EQ(threshold_label(0.3, kNeuralNetThreshold), 0);
}

TEST(Train, SingleClassGivesConstantPredictor) {
    auto ds = testsupport::separable_blobs(40, 3, 1.0, 0.0, 0.5, 1);
    for (auto& r : ds.rows) r.theta = 0;
    for (auto id : builtin_algorithms()) {
        const auto m = train(id, ds, Hyperparams::defaults(id), 1);
        EXPECT_TRUE(m.info().degenerate);
        EXPECT_FALSE(m.info().warnings.empty());
        for (int label : m.predict(features_of(ds)).labels) EXPECT_EQ(label, 0);
    }
}

TEST(Train, KnnOneMemorizes) {
    const auto ds = testsupport::separable_blobs(150, 5, 0.3, 0.0, 0.4, 2);
    auto hp = Hyperparams::defaults(AlgorithmId::knn);
    hp.set("k", 1);
    const auto m = train(AlgorithmId::knn, ds, hp, 0);
    EXPECT_EQ(m.predict(features_of(ds)).labels, labels_of(ds));
}

TEST(Train, LogisticSeparatesBlobs) {
    const auto ds = testsupport::separable_blobs(200, 2, 1.0, 1.0, 0.5, 3);
    const auto m = train(AlgorithmId::logistic_regression, ds, Hyperparams::defaults(AlgorithmId::logistic_regression), 0);
    const auto pred = m.predict(features_of(ds));
    EXPECT_GE(evaluate(pred.labels, labels_of(ds)).accuracy, 0.99);
    ASSERT_TRUE(pred.scores.has_value());
    for (double s : *pred.scores) {
        EXPECT_GE(s, 0.0);
        EXPECT_LE(s, 1.0);
    }
}

TEST(Train, TreesInvariantUnderMonotoneTransforms) {
    const auto ds = testsupport::separable_blobs(300, 4, 0.4, 0.0, 0.5, 4);
    const auto tr = rows(ds, 0, 200), te = rows(ds, 200, 300);
    const auto tr2 = transform(tr), te2 = transform(te);
    for (auto id : {AlgorithmId::decision_tree, AlgorithmId::random_forest}) {
        auto hp = Hyperparams::defaults(id);
        if (id == AlgorithmId::random_forest) hp.set("n_trees", 25);
        const auto a = train(id, tr, hp, 9).predict(features_of(te));
        const auto b = train(id, tr2, hp, 9).predict(features_of(te2));
        EXPECT_EQ(a.labels, b.labels) << to_string(id);
        EXPECT_EQ(*a.scores, *b.scores) << to_string(id);
    }
}

TEST(Train, NeuralNetLabelsFollowThreshold) {
    const auto ds = testsupport::separable_blobs(120, 4, 0.3, 0.0, 0.3, 6);
    auto hp = Hyperparams::defaults(AlgorithmId::neural_net);
    hp.set("epochs", 20);
    const auto pred = train(AlgorithmId::neural_net, ds, hp, 3).predict(features_of(ds));
    ASSERT_TRUE(pred.scores.has_value());
    for (std::size_t i = 0; i < pred.labels.size(); ++i) EXPECT_EQ(pred.labels[i], (*pred.scores)[i] > 0.3 ? 1 : 0);
}

TEST(Train, DeterministicAcrossRunsAndThreads) {
    const auto ds = testsupport::separable_blobs(150, 6, 0.3, 0.0, 0.4, 7);
    const auto x = features_of(ds);
    for (auto id : builtin_algorithms()) {
        auto hp = Hyperparams::defaults(id);
        if (id == AlgorithmId::neural_net) hp.set("epochs", 10);
        const auto a = train(id, ds, hp, 5, 1).predict(x);
        const auto b = train(id, ds, hp, 5, 4).predict(x);
        EXPECT_EQ(a.labels, b.labels) << to_string(id);
        EXPECT_EQ(a.scores, b.scores) << to_string(id);
    }
}

TEST(Train, RejectsBadInputs) {
    const auto ds = testsupport::separable_blobs(50, 3, 1.0, 0.0, 0.5, 1);
    auto hp = Hyperparams::defaults(AlgorithmId::knn);
    EXPECT_THROW(hp.set("depth", 3), ConfigError);
    EXPECT_THROW(hp.get("depth"), ConfigError);
    const auto m = train(AlgorithmId::knn, ds, hp, 0);
    EXPECT_THROW(m.predict(Matrix(3, 4)), InvalidParameter);
    EXPECT_THROW(parse_algorithm("lstm"), ConfigError);
    EXPECT_EQ(parse_algorithm("random_forest"), AlgorithmId::random_forest);
}

TEST(Benchmark, SupportsAndExternals) {
    const auto ds = testsupport::separable_blobs(400, 4, 0.5, 0.0, 0.4, 11);
    const std::vector<SplitSpec> splits{{"A", parse_range("0:199"), parse_range("200:299")},
                                        {"B", parse_range("100:299"), parse_range("300:399")}};
    BenchmarkOptions opts;
    opts.seed = 3;
    opts.hyperparams[AlgorithmId::neural_net] = Hyperparams::defaults(AlgorithmId::neural_net);
    opts.hyperparams[AlgorithmId::neural_net].set("epochs", 5);
    opts.hyperparams[AlgorithmId::random_forest] = Hyperparams::defaults(AlgorithmId::random_forest);
    opts.hyperparams[AlgorithmId::random_forest].set("n_trees", 10);

    ExternalPredictions ext{"lstm", "A", {}};
    for (const auto& r : ds.rows) ext.labels[r.index] = 1;
    opts.externals.push_back(ext);

    const std::vector<AlgorithmId> ids(builtin_algorithms().begin(), builtin_algorithms().end());
    const auto t1 = run_benchmark(ds, splits, ids, opts);
    ASSERT_EQ(t1.cells.size(), 2u * 9u + 1u);
    for (const auto& cell : t1.cells) {
        const auto& ref = cell.split == "A" ? t1.cells[0] : t1.cells[10];
        EXPECT_EQ(cell.report.classes[0].support, ref.report.classes[0].support);
        EXPECT_EQ(cell.report.classes[1].support, ref.report.classes[1].support);
        EXPECT_EQ(cell.report.total, 100u);
    }
    EXPECT_EQ(t1.cells[9].split, "A");
    EXPECT_EQ(t1.cells[9].algorithm, "lstm");
    EXPECT_EQ(t1.cells[9].report.classes[1].recall, 1.0);

    opts.threads = 4;
    const auto t2 = run_benchmark(ds, splits, ids, opts);
    for (std::size_t i = 0; i < t1.cells.size(); ++i) EXPECT_EQ(t1.cells[i].predictions, t2.cells[i].predictions);

    std::ostringstream csv, text;
    write_report_csv(csv, t1, "B");
    write_report_text(text, t1);
    const std::string csv_text = csv.str();
    EXPECT_EQ(csv_text.substr(0, csv_text.find('\n')), kReportCsvHeader);
    EXPECT_EQ(std::count(csv_text.begin(), csv_text.end(), '\n'), 10);
    EXPECT_NE(text.str().find("split A"), std::string::npos);
    EXPECT_NE(text.str().find("split B"), std::string::npos);
}

TEST(Benchmark, ExternalPassthroughMatchesBuiltinScoring) {
    const auto ds = testsupport::separable_blobs(100, 3, 0.5, 0.0, 0.5, 12);
    const std::vector<SplitSpec> splits{{"S", parse_range("0:59"), parse_range("60:99")}};
    BenchmarkOptions opts;
    const auto t = run_benchmark(ds, splits, {AlgorithmId::knn}, opts);
    std::stringstream ss;
    write_predictions_csv(ss, t.cells[0].index, t.cells[0].predictions);
    const auto ext = read_predictions_csv(ss, "copy");
    const auto test_set = labeling::split(ds, splits[0]).test;
    const auto cell = score_external(test_set, ext, "S");
    EXPECT_EQ(cell.predictions, t.cells[0].predictions);
    EXPECT_EQ(cell.report.accuracy, t.cells[0].report.accuracy);

    ExternalPredictions partial{"gap", "", {{60, 1}}};
    EXPECT_THROW(score_external(test_set, partial, "S"), InvalidParameter);
}
