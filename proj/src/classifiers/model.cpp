#include "bnsjump/classifiers.hpp"

#include "bnsjump/common.hpp"

#include <algorithm>

namespace bnsjump::ml {

Model train(AlgorithmId id, const Matrix& x, std::span<const int> y, const Hyperparams& hp, std::uint64_t seed,
            unsigned threads) {
    if (id == AlgorithmId::external) throw InvalidParameter("external predictions cannot be trained");
    if (x.rows() == 0) throw InvalidParameter("training set is empty");
    if (y.size() != x.rows()) throw InvalidParameter("labels are not aligned with feature rows");
    if (x.cols() == 0) throw InvalidParameter("training set has no features");
    for (int v : y) {
        if (v != 0 && v != 1) throw InvalidParameter("labels must be 0 or 1");
    }
    // Catches keys that belong to a different algorithm.
    const Hyperparams defaults = Hyperparams::defaults(id);
    for (const auto& [key, value] : hp.values()) {
        if (!defaults.values().contains(key)) throw ConfigError("unknown hyperparameter '" + key + "' for " + std::string(to_string(id)));
    }

    Model m;
    m.id_ = id;
    m.hp_ = hp;
    m.info_.seed = seed;
    m.info_.rows = x.rows();
    m.info_.width = x.cols();

    const auto ones = std::count(y.begin(), y.end(), 1);
    if (ones == 0 || ones == static_cast<std::ptrdiff_t>(y.size())) {
        m.constant_ = ones == 0 ? 0 : 1;
        m.info_.degenerate = true;
        m.info_.warnings.push_back(std::string(to_string(id)) + ": training set holds only class " +
                                   std::to_string(*m.constant_) + "; using a constant predictor");
        return m;
    }

    const Matrix* fit_x = &x;
    Matrix scaled;
    if (hp.get("standardize") != 0.0) {
        m.standardizer_ = detail::Standardizer::fit(x);
        scaled = m.standardizer_->apply(x);
        fit_x = &scaled;
    }

    switch (id) {
        case AlgorithmId::logistic_regression: m.learner_ = detail::fit_logistic(*fit_x, y, hp); break;
        case AlgorithmId::svm_linear: m.learner_ = detail::fit_svm(*fit_x, y, hp); break;
        case AlgorithmId::knn: m.learner_ = detail::fit_knn(*fit_x, y, hp); break;
        case AlgorithmId::kmeans: m.learner_ = detail::fit_kmeans(*fit_x, y, hp, seed); break;
        case AlgorithmId::naive_bayes_gaussian: m.learner_ = detail::fit_naive_bayes(*fit_x, y, hp); break;
        case AlgorithmId::gradient_boost: m.learner_ = detail::fit_gradient_boost(*fit_x, y, hp); break;
        case AlgorithmId::decision_tree: m.learner_ = detail::fit_decision_tree(*fit_x, y, hp); break;
        case AlgorithmId::random_forest: m.learner_ = detail::fit_random_forest(*fit_x, y, hp, seed, threads); break;
        case AlgorithmId::neural_net: m.learner_ = detail::fit_neural_net(*fit_x, y, hp, seed); break;
        case AlgorithmId::external: break;
    }
    return m;
}

Model train(AlgorithmId id, const labeling::LabeledDataset& train_set, const Hyperparams& hp, std::uint64_t seed,
            unsigned threads) {
    const auto y = labels_of(train_set);
    return train(id, features_of(train_set), y, hp, seed, threads);
}

Prediction Model::predict(const Matrix& x) const {
    if (x.cols() != info_.width) {
        throw InvalidParameter("model was trained on " + std::to_string(info_.width) + " features, got " +
                               std::to_string(x.cols()));
    }
    if (constant_) {
        Prediction p;
        p.labels.assign(x.rows(), *constant_);
        return p;
    }
    if (standardizer_) return learner_->predict(standardizer_->apply(x));
    return learner_->predict(x);
}

Prediction predict(const Model& model, const Matrix& x) { return model.predict(x); }

}  // namespace bnsjump::ml
