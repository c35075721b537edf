#include "bnsjump/classifiers.hpp"

#include <cmath>

namespace bnsjump::ml::detail {

namespace {

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

double dot(std::span<const double> a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * b[j];
    return s;
}

class LinearModel final : public Learner {
public:
    LinearModel(std::vector<double> w, double b, bool probabilistic)
        : w_(std::move(w)), b_(b), probabilistic_(probabilistic) {}

    Prediction predict(const Matrix& x) const override {
        Prediction p;
        p.labels.resize(x.rows());
        std::vector<double> scores(x.rows());
        for (std::size_t i = 0; i < x.rows(); ++i) {
            const double margin = dot(x.row(i), w_) + b_;
            if (probabilistic_) {
                scores[i] = sigmoid(margin);
                p.labels[i] = scores[i] >= 0.5 ? 1 : 0;
            } else {
                p.labels[i] = margin >= 0.0 ? 1 : 0;
            }
        }
        if (probabilistic_) p.scores = std::move(scores);
        return p;
    }

private:
    std::vector<double> w_;
    double b_;
    bool probabilistic_;
};

}  // namespace

// Maximum likelihood with a small ridge penalty, full-batch gradient descent.
std::unique_ptr<Learner> fit_logistic(const Matrix& x, std::span<const int> y, const Hyperparams& hp) {
    const double lr = hp.get("learning_rate");
    const auto epochs = static_cast<std::size_t>(hp.get("epochs"));
    const double l2 = hp.get("l2");
    const std::size_t n = x.rows(), d = x.cols();
    const double inv_n = 1.0 / static_cast<double>(n);

    std::vector<double> w(d, 0.0), grad(d);
    double b = 0.0;
    for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
        std::fill(grad.begin(), grad.end(), 0.0);
        double grad_b = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto row = x.row(i);
            const double err = sigmoid(dot(row, w) + b) - y[i];
            for (std::size_t j = 0; j < d; ++j) grad[j] += err * row[j];
            grad_b += err;
        }
        for (std::size_t j = 0; j < d; ++j) w[j] -= lr * (grad[j] * inv_n + l2 * w[j]);
        b -= lr * grad_b * inv_n;
    }
    return std::make_unique<LinearModel>(std::move(w), b, true);
}

// Primal soft-margin SVM: minimise ||w||^2 / (2 C n) + mean hinge loss by subgradient descent with a
// 1/sqrt(t) step schedule.
std::unique_ptr<Learner> fit_svm(const Matrix& x, std::span<const int> y, const Hyperparams& hp) {
    const double C = hp.get("C");
    const auto epochs = static_cast<std::size_t>(hp.get("epochs"));
    const double lr = hp.get("learning_rate");
    const std::size_t n = x.rows(), d = x.cols();
    const double inv_n = 1.0 / static_cast<double>(n);
    const double reg = 1.0 / (C * static_cast<double>(n));

    std::vector<double> w(d, 0.0), grad(d);
    double b = 0.0;
    for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
        for (std::size_t j = 0; j < d; ++j) grad[j] = reg * w[j];
        double grad_b = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double s = y[i] == 1 ? 1.0 : -1.0;
            const auto row = x.row(i);
            if (s * (dot(row, w) + b) < 1.0) {
                for (std::size_t j = 0; j < d; ++j) grad[j] -= s * row[j] * inv_n;
                grad_b -= s * inv_n;
            }
        }
        const double step = lr / std::sqrt(static_cast<double>(epoch) + 1.0);
        for (std::size_t j = 0; j < d; ++j) w[j] -= step * grad[j];
        b -= step * grad_b;
    }
    return std::make_unique<LinearModel>(std::move(w), b, false);
}

}  // namespace bnsjump::ml::detail
