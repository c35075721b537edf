#pragma once

// Binary theta classifiers written from scratch, and the precision/recall/F1/support harness.

#include "bnsjump/jump_labeling.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bnsjump::ml {

/// Dense row-major feature matrix.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
    std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const std::vector<double>& data() const noexcept { return data_; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Matrix features_of(const labeling::LabeledDataset& ds);
std::vector<int> labels_of(const labeling::LabeledDataset& ds);

enum class AlgorithmId {
    logistic_regression,
    svm_linear,
    knn,
    kmeans,
    naive_bayes_gaussian,
    gradient_boost,
    decision_tree,
    random_forest,
    neural_net,
    external,  // predictions produced outside the toolkit
};

std::string_view to_string(AlgorithmId id);
AlgorithmId parse_algorithm(std::string_view name);
/// The nine built-in learners in table order.
const std::array<AlgorithmId, 9>& builtin_algorithms();

/// Per-algorithm key/value settings. Keys outside the algorithm's defaults are rejected.
class Hyperparams {
public:
    static Hyperparams defaults(AlgorithmId id);

    void set(const std::string& key, double value);
    double get(const std::string& key) const;
    const std::map<std::string, double>& values() const noexcept { return values_; }

private:
    AlgorithmId id_ = AlgorithmId::logistic_regression;
    std::map<std::string, double> values_;
};

/// Decision threshold the neural net applies to the class-1 softmax probability.
inline constexpr double kNeuralNetThreshold = 0.3;

/// 1 when the class-1 probability exceeds the threshold.
inline int threshold_label(double p1, double threshold) { return p1 > threshold ? 1 : 0; }

struct Prediction {
    std::vector<int> labels;
    std::optional<std::vector<double>> scores;  // class-1 probability where the model defines one
};

struct TrainingInfo {
    std::uint64_t seed = 0;
    std::size_t rows = 0;
    std::size_t width = 0;
    bool degenerate = false;
    std::vector<std::string> warnings;
};

namespace detail {

class Learner {
public:
    virtual ~Learner() = default;
    virtual Prediction predict(const Matrix& x) const = 0;
};

/// Per-feature z-scoring fitted on training rows; zero-variance features keep unit scale.
struct Standardizer {
    std::vector<double> mean;
    std::vector<double> scale;

    static Standardizer fit(const Matrix& x);
    Matrix apply(const Matrix& x) const;
};

std::unique_ptr<Learner> fit_logistic(const Matrix& x, std::span<const int> y, const Hyperparams& hp);
std::unique_ptr<Learner> fit_svm(const Matrix& x, std::span<const int> y, const Hyperparams& hp);
std::unique_ptr<Learner> fit_knn(const Matrix& x, std::span<const int> y, const Hyperparams& hp);
std::unique_ptr<Learner> fit_kmeans(const Matrix& x, std::span<const int> y, const Hyperparams& hp, std::uint64_t seed);
std::unique_ptr<Learner> fit_naive_bayes(const Matrix& x, std::span<const int> y, const Hyperparams& hp);
std::unique_ptr<Learner> fit_decision_tree(const Matrix& x, std::span<const int> y, const Hyperparams& hp);
std::unique_ptr<Learner> fit_random_forest(const Matrix& x, std::span<const int> y, const Hyperparams& hp,
                                           std::uint64_t seed, unsigned threads);
std::unique_ptr<Learner> fit_gradient_boost(const Matrix& x, std::span<const int> y, const Hyperparams& hp);
std::unique_ptr<Learner> fit_neural_net(const Matrix& x, std::span<const int> y, const Hyperparams& hp,
                                        std::uint64_t seed);

}  // namespace detail

class Model {
public:
    AlgorithmId id() const noexcept { return id_; }
    const TrainingInfo& info() const noexcept { return info_; }
    const Hyperparams& hyperparams() const noexcept { return hp_; }
    Prediction predict(const Matrix& x) const;

private:
    friend Model train(AlgorithmId, const Matrix&, std::span<const int>, const Hyperparams&, std::uint64_t, unsigned);

    AlgorithmId id_ = AlgorithmId::logistic_regression;
    Hyperparams hp_;
    TrainingInfo info_;
    std::optional<detail::Standardizer> standardizer_;
    std::optional<int> constant_;
    std::shared_ptr<const detail::Learner> learner_;
};

/// Deterministic in (id, data, hp, seed); `threads` only affects wall time. A training set holding a
/// single class yields a constant predictor flagged degenerate.
Model train(AlgorithmId id, const Matrix& x, std::span<const int> y, const Hyperparams& hp, std::uint64_t seed,
            unsigned threads = 1);
Model train(AlgorithmId id, const labeling::LabeledDataset& train_set, const Hyperparams& hp, std::uint64_t seed,
            unsigned threads = 1);

Prediction predict(const Model& model, const Matrix& x);

struct ClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t support = 0;
    std::size_t true_positive = 0;
    std::size_t false_positive = 0;
    std::size_t false_negative = 0;
    bool precision_undefined = false;  // 0/0, reported as 0
    bool recall_undefined = false;
    bool f1_undefined = false;
};

struct ClassReport {
    std::array<ClassMetrics, 2> classes;
    double accuracy = 0.0;
    std::size_t total = 0;
};

ClassReport evaluate(std::span<const int> predictions, std::span<const int> truth);

/// Labels produced elsewhere, keyed by dataset index. An empty `split` applies to every split.
struct ExternalPredictions {
    std::string name;
    std::string split;
    std::map<std::int64_t, int> labels;
};

/// `index,predicted_theta`.
ExternalPredictions read_predictions_csv(std::istream& in, std::string name, std::string split = {});
void write_predictions_csv(std::ostream& out, std::span<const std::int64_t> index, std::span<const int> labels);

struct BenchmarkCell {
    std::string split;
    std::string algorithm;
    ClassReport report;
    std::optional<TrainingInfo> info;
    std::vector<std::int64_t> index;
    std::vector<int> predictions;
};

struct BenchmarkTable {
    std::vector<BenchmarkCell> cells;
};

struct BenchmarkOptions {
    std::uint64_t seed = 0;
    unsigned threads = 1;
    std::map<AlgorithmId, Hyperparams> hyperparams;  // missing ids use defaults
    std::vector<ExternalPredictions> externals;
};

/// One report per (split, algorithm) followed by one per matching external file. Throws AssertionFailure
/// if supports differ between algorithms of one split.
BenchmarkTable run_benchmark(const labeling::LabeledDataset& dataset, const std::vector<labeling::SplitSpec>& splits,
                             const std::vector<AlgorithmId>& ids, const BenchmarkOptions& opts);

/// Scores one set of predictions against a test set (used for externals and the CLI report command).
BenchmarkCell score_external(const labeling::LabeledDataset& test_set, const ExternalPredictions& ext,
                             const std::string& split_name);

inline constexpr const char* kReportCsvHeader =
    "algorithm,precision0,recall0,f1_0,support0,precision1,recall1,f1_1,support1";

/// Rows for one split, columns as in kReportCsvHeader.
void write_report_csv(std::ostream& out, const BenchmarkTable& table, const std::string& split);
/// All splits as aligned text blocks with two decimals.
void write_report_text(std::ostream& out, const BenchmarkTable& table);

}  // namespace bnsjump::ml
