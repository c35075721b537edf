#include "bnsjump/classifiers.hpp"

#include "bnsjump/common.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace bnsjump::ml::detail {

namespace {

// Dense layer y = W x + b with W stored row-major (out x in).
struct Layer {
    std::size_t in = 0, out = 0;
    std::vector<double> w, b;

    Layer(std::size_t in_, std::size_t out_, std::mt19937_64& rng) : in(in_), out(out_), w(in_ * out_), b(out_, 0.0) {
        std::normal_distribution<double> g(0.0, std::sqrt(2.0 / static_cast<double>(in_)));
        for (auto& v : w) v = g(rng);
    }

    void forward(const double* x, double* y) const {
        for (std::size_t o = 0; o < out; ++o) {
            double s = b[o];
            const double* row = w.data() + o * in;
            for (std::size_t i = 0; i < in; ++i) s += row[i] * x[i];
            y[o] = s;
        }
    }
};

struct Adam {
    std::vector<double> m, v;
    double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;

    explicit Adam(std::size_t n) : m(n, 0.0), v(n, 0.0) {}

    void step(std::vector<double>& p, const std::vector<double>& g, double lr, std::size_t t) {
        const double c1 = 1.0 - std::pow(beta1, static_cast<double>(t));
        const double c2 = 1.0 - std::pow(beta2, static_cast<double>(t));
        for (std::size_t i = 0; i < p.size(); ++i) {
            m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
            v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
            p[i] -= lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + eps);
        }
    }
};

class Mlp final : public Learner {
public:
    Mlp(std::vector<Layer> layers, double threshold) : layers_(std::move(layers)), threshold_(threshold) {}

    // Class-1 softmax probability.
    double prob1(std::span<const double> x) const {
        std::vector<double> a(x.begin(), x.end()), z;
        for (std::size_t l = 0; l < layers_.size(); ++l) {
            z.assign(layers_[l].out, 0.0);
            layers_[l].forward(a.data(), z.data());
            if (l + 1 < layers_.size()) {
                for (auto& v : z) v = std::max(v, 0.0);
            }
            a.swap(z);
        }
        return 1.0 / (1.0 + std::exp(a[0] - a[1]));
    }

    Prediction predict(const Matrix& x) const override {
        Prediction p;
        p.labels.resize(x.rows());
        std::vector<double> scores(x.rows());
        for (std::size_t i = 0; i < x.rows(); ++i) {
            scores[i] = prob1(x.row(i));
            p.labels[i] = threshold_label(scores[i], threshold_);
        }
        p.scores = std::move(scores);
        return p;
    }

private:
    std::vector<Layer> layers_;
    double threshold_;
};

}  // namespace

// Two ReLU hidden layers, two-way softmax output, cross-entropy loss, Adam on shuffled minibatches.
std::unique_ptr<Learner> fit_neural_net(const Matrix& x, std::span<const int> y, const Hyperparams& hp,
                                        std::uint64_t seed) {
    const auto hidden = static_cast<std::size_t>(hp.get("hidden"));
    const auto epochs = static_cast<std::size_t>(hp.get("epochs"));
    const double lr = hp.get("learning_rate");
    const auto batch = std::max<std::size_t>(1, static_cast<std::size_t>(hp.get("batch_size")));
    const double threshold = hp.get("threshold");
    if (hidden == 0) throw InvalidParameter("neural_net hidden width must be positive");
    if (threshold < 0.0 || threshold > 1.0) throw InvalidParameter("neural_net threshold must lie in [0, 1]");

    std::mt19937_64 rng(seed);
    std::vector<Layer> layers;
    layers.emplace_back(x.cols(), hidden, rng);
    layers.emplace_back(hidden, hidden, rng);
    layers.emplace_back(hidden, 2, rng);

    std::vector<Adam> opt_w, opt_b;
    for (const auto& l : layers) {
        opt_w.emplace_back(l.w.size());
        opt_b.emplace_back(l.b.size());
    }
    std::vector<std::vector<double>> gw(layers.size()), gb(layers.size());
    for (std::size_t l = 0; l < layers.size(); ++l) {
        gw[l].resize(layers[l].w.size());
        gb[l].resize(layers[l].b.size());
    }

    const std::size_t n = x.rows();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<std::vector<double>> act(layers.size() + 1), delta(layers.size());
    std::size_t step = 0;
    for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t start = 0; start < n; start += batch) {
            const std::size_t stop = std::min(n, start + batch);
            for (std::size_t l = 0; l < layers.size(); ++l) {
                std::fill(gw[l].begin(), gw[l].end(), 0.0);
                std::fill(gb[l].begin(), gb[l].end(), 0.0);
            }
            for (std::size_t k = start; k < stop; ++k) {
                const auto row = x.row(order[k]);
                act[0].assign(row.begin(), row.end());
                for (std::size_t l = 0; l < layers.size(); ++l) {
                    act[l + 1].assign(layers[l].out, 0.0);
                    layers[l].forward(act[l].data(), act[l + 1].data());
                    if (l + 1 < layers.size()) {
                        for (auto& v : act[l + 1]) v = std::max(v, 0.0);
                    }
                }
                // Softmax cross-entropy gradient with respect to the logits.
                const auto& logits = act.back();
                const double mx = std::max(logits[0], logits[1]);
                const double e0 = std::exp(logits[0] - mx), e1 = std::exp(logits[1] - mx);
                const double p1 = e1 / (e0 + e1);
                delta.back() = {(1.0 - p1) - (y[order[k]] == 0 ? 1.0 : 0.0), p1 - (y[order[k]] == 1 ? 1.0 : 0.0)};
                for (std::size_t l = layers.size(); l-- > 0;) {
                    const auto& L = layers[l];
                    const auto& d = delta[l];
                    for (std::size_t o = 0; o < L.out; ++o) {
                        gb[l][o] += d[o];
                        double* g = gw[l].data() + o * L.in;
                        for (std::size_t i = 0; i < L.in; ++i) g[i] += d[o] * act[l][i];
                    }
                    if (l == 0) break;
                    auto& prev = delta[l - 1];
                    prev.assign(L.in, 0.0);
                    for (std::size_t o = 0; o < L.out; ++o) {
                        const double* w = L.w.data() + o * L.in;
                        for (std::size_t i = 0; i < L.in; ++i) prev[i] += w[i] * d[o];
                    }
                    for (std::size_t i = 0; i < L.in; ++i) {
                        if (act[l][i] <= 0.0) prev[i] = 0.0;
                    }
                }
            }
            const double scale = 1.0 / static_cast<double>(stop - start);
            ++step;
            for (std::size_t l = 0; l < layers.size(); ++l) {
                for (auto& g : gw[l]) g *= scale;
                for (auto& g : gb[l]) g *= scale;
                opt_w[l].step(layers[l].w, gw[l], lr, step);
                opt_b[l].step(layers[l].b, gb[l], lr, step);
            }
        }
    }
    return std::make_unique<Mlp>(std::move(layers), threshold);
}

}  // namespace bnsjump::ml::detail
