#include "bnsjump/classifiers.hpp"

#include <cmath>
#include <numbers>

namespace bnsjump::ml::detail {

namespace {

class GaussianNb final : public Learner {
public:
    GaussianNb(std::array<double, 2> log_prior, std::array<std::vector<double>, 2> mean,
               std::array<std::vector<double>, 2> var)
        : log_prior_(log_prior), mean_(std::move(mean)), var_(std::move(var)) {}

    Prediction predict(const Matrix& x) const override {
        Prediction p;
        p.labels.resize(x.rows());
        std::vector<double> scores(x.rows());
        for (std::size_t i = 0; i < x.rows(); ++i) {
            std::array<double, 2> ll = log_prior_;
            for (int c = 0; c < 2; ++c) {
                for (std::size_t j = 0; j < x.cols(); ++j) {
                    const double z = x(i, j) - mean_[c][j];
                    ll[c] -= 0.5 * (std::log(2.0 * std::numbers::pi * var_[c][j]) + z * z / var_[c][j]);
                }
            }
            const double p1 = 1.0 / (1.0 + std::exp(ll[0] - ll[1]));
            scores[i] = p1;
            p.labels[i] = ll[1] > ll[0] ? 1 : 0;
        }
        p.scores = std::move(scores);
        return p;
    }

private:
    std::array<double, 2> log_prior_;
    std::array<std::vector<double>, 2> mean_;
    std::array<std::vector<double>, 2> var_;
};

}  // namespace

std::unique_ptr<Learner> fit_naive_bayes(const Matrix& x, std::span<const int> y, const Hyperparams& hp) {
    const double floor = hp.get("var_floor");
    const std::size_t d = x.cols();
    std::array<double, 2> count{0.0, 0.0};
    std::array<std::vector<double>, 2> mean{std::vector<double>(d, 0.0), std::vector<double>(d, 0.0)};
    std::array<std::vector<double>, 2> var{std::vector<double>(d, 0.0), std::vector<double>(d, 0.0)};
    for (std::size_t i = 0; i < x.rows(); ++i) {
        count[y[i]] += 1.0;
        for (std::size_t j = 0; j < d; ++j) mean[y[i]][j] += x(i, j);
    }
    for (int c = 0; c < 2; ++c)
        for (auto& m : mean[c]) m /= count[c];
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t j = 0; j < d; ++j) var[y[i]][j] += (x(i, j) - mean[y[i]][j]) * (x(i, j) - mean[y[i]][j]);
    for (int c = 0; c < 2; ++c)
        for (auto& v : var[c]) v = std::max(v / count[c], floor);
    const double n = count[0] + count[1];
    return std::make_unique<GaussianNb>(std::array<double, 2>{std::log(count[0] / n), std::log(count[1] / n)},
                                        std::move(mean), std::move(var));
}

}  // namespace bnsjump::ml::detail
