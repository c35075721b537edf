#include "bnsjump/classifiers.hpp"

#include "bnsjump/common.hpp"

#include <cmath>

namespace bnsjump::ml {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) throw InvalidParameter("matrix data does not match its shape");
}

Matrix features_of(const labeling::LabeledDataset& ds) {
    Matrix m(ds.rows.size(), ds.window_len);
    for (std::size_t i = 0; i < ds.rows.size(); ++i) {
        const auto& f = ds.rows[i].features;
        if (f.size() != ds.window_len) throw InvalidParameter("dataset row has the wrong feature width");
        std::copy(f.begin(), f.end(), m.row(i).begin());
    }
    return m;
}

std::vector<int> labels_of(const labeling::LabeledDataset& ds) {
    std::vector<int> y;
    y.reserve(ds.rows.size());
    for (const auto& r : ds.rows) y.push_back(r.theta);
    return y;
}

namespace {

constexpr std::array<AlgorithmId, 9> kBuiltins = {
    AlgorithmId::logistic_regression, AlgorithmId::svm_linear,    AlgorithmId::knn,
    AlgorithmId::kmeans,              AlgorithmId::naive_bayes_gaussian, AlgorithmId::gradient_boost,
    AlgorithmId::decision_tree,       AlgorithmId::random_forest, AlgorithmId::neural_net,
};

}  // namespace

const std::array<AlgorithmId, 9>& builtin_algorithms() { return kBuiltins; }

std::string_view to_string(AlgorithmId id) {
    switch (id) {
        case AlgorithmId::logistic_regression: return "logistic_regression";
        case AlgorithmId::svm_linear: return "svm_linear";
        case AlgorithmId::knn: return "knn";
        case AlgorithmId::kmeans: return "kmeans";
        case AlgorithmId::naive_bayes_gaussian: return "naive_bayes_gaussian";
        case AlgorithmId::gradient_boost: return "gradient_boost";
        case AlgorithmId::decision_tree: return "decision_tree";
        case AlgorithmId::random_forest: return "random_forest";
        case AlgorithmId::neural_net: return "neural_net";
        case AlgorithmId::external: return "external";
    }
    return "unknown";
}

AlgorithmId parse_algorithm(std::string_view name) {
    name = trim(name);
    for (AlgorithmId id : kBuiltins) {
        if (to_string(id) == name) return id;
    }
    if (name == "external") return AlgorithmId::external;
    throw ConfigError("unknown algorithm '" + std::string(name) + "'");
}

Hyperparams Hyperparams::defaults(AlgorithmId id) {
    Hyperparams hp;
    hp.id_ = id;
    auto& v = hp.values_;
    switch (id) {
        case AlgorithmId::logistic_regression:
            v = {{"learning_rate", 0.1}, {"epochs", 500}, {"l2", 1e-4}};
            break;
        case AlgorithmId::svm_linear:
            v = {{"C", 1.0}, {"epochs", 500}, {"learning_rate", 0.1}};
            break;
        case AlgorithmId::knn:
            v = {{"k", 5}};
            break;
        case AlgorithmId::kmeans:
            v = {{"k", 2}, {"iterations", 100}, {"restarts", 10}};
            break;
        case AlgorithmId::naive_bayes_gaussian:
            v = {{"var_floor", 1e-9}};
            break;
        case AlgorithmId::gradient_boost:
            v = {{"n_trees", 100}, {"max_depth", 3}, {"learning_rate", 0.1}, {"min_leaf", 1}};
            break;
        case AlgorithmId::decision_tree:
            v = {{"max_depth", 6}, {"min_leaf", 5}};
            break;
        case AlgorithmId::random_forest:
            // max_depth 0 grows until leaves are pure; max_features 0 means floor(sqrt(d)).
            v = {{"n_trees", 100}, {"max_depth", 0}, {"min_leaf", 1}, {"max_features", 0}};
            break;
        case AlgorithmId::neural_net:
            v = {{"hidden", 32}, {"epochs", 200}, {"learning_rate", 1e-3}, {"batch_size", 32},
                 {"threshold", kNeuralNetThreshold}};
            break;
        case AlgorithmId::external:
            break;
    }
    if (id != AlgorithmId::external) v["standardize"] = 1.0;
    return hp;
}

void Hyperparams::set(const std::string& key, double value) {
    auto it = values_.find(key);
    if (it == values_.end()) {
        throw ConfigError("unknown hyperparameter '" + key + "' for " + std::string(to_string(id_)));
    }
    if (!std::isfinite(value)) throw ConfigError("hyperparameter '" + key + "' must be finite");
    it->second = value;
}

double Hyperparams::get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("unknown hyperparameter '" + key + "' for " + std::string(to_string(id_)));
    return it->second;
}

namespace detail {

Standardizer Standardizer::fit(const Matrix& x) {
    Standardizer s;
    s.mean.assign(x.cols(), 0.0);
    s.scale.assign(x.cols(), 1.0);
    if (x.rows() == 0) return s;
    const double n = static_cast<double>(x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t j = 0; j < x.cols(); ++j) s.mean[j] += x(i, j);
    for (auto& m : s.mean) m /= n;
    std::vector<double> ss(x.cols(), 0.0);
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t j = 0; j < x.cols(); ++j) ss[j] += (x(i, j) - s.mean[j]) * (x(i, j) - s.mean[j]);
    for (std::size_t j = 0; j < x.cols(); ++j) {
        const double sd = std::sqrt(ss[j] / n);
        s.scale[j] = sd > 0.0 ? sd : 1.0;
    }
    return s;
}

Matrix Standardizer::apply(const Matrix& x) const {
    Matrix out(x.rows(), x.cols());
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t j = 0; j < x.cols(); ++j) out(i, j) = (x(i, j) - mean[j]) / scale[j];
    return out;
}

}  // namespace detail

}  // namespace bnsjump::ml
