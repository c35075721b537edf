#include "bnsjump/classifiers.hpp"

#include "bnsjump/common.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>

namespace bnsjump::ml::detail {

namespace {

struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    std::size_t left = 0;
    std::size_t right = 0;
    double value = 0.0;
};

// Splits send x <= threshold left, with thresholds taken from training values, so the fitted partition
// depends only on the per-feature ordering of the data.
class Tree {
public:
    double eval(std::span<const double> x) const {
        std::size_t n = 0;
        while (nodes_[n].feature >= 0) {
            n = x[static_cast<std::size_t>(nodes_[n].feature)] <= nodes_[n].threshold ? nodes_[n].left : nodes_[n].right;
        }
        return nodes_[n].value;
    }

    std::vector<Node> nodes_;
};

struct GrowOptions {
    std::size_t max_depth = 0;  // 0: unlimited
    std::size_t min_leaf = 1;
    std::size_t max_features = 0;  // 0: all features
};

using LeafValue = std::function<double(std::span<const std::size_t>)>;

// Greedy CART on squared error of `target`; for 0/1 targets this is the Gini criterion up to a factor 2.
class Grower {
public:
    Grower(const Matrix& x, std::span<const double> target, GrowOptions opts, LeafValue leaf, std::mt19937_64* rng)
        : x_(x), target_(target), opts_(opts), leaf_(std::move(leaf)), rng_(rng) {
        features_.resize(x.cols());
        std::iota(features_.begin(), features_.end(), std::size_t{0});
    }

    Tree grow(std::vector<std::size_t> rows) {
        Tree t;
        build(t, rows, 0);
        return t;
    }

private:
    struct Split {
        bool found = false;
        std::size_t feature = 0;
        double threshold = 0.0;
        double gain = 0.0;
    };

    std::size_t build(Tree& t, std::vector<std::size_t>& rows, std::size_t depth) {
        const std::size_t id = t.nodes_.size();
        t.nodes_.emplace_back();
        const Split s = (opts_.max_depth == 0 || depth < opts_.max_depth) ? best_split(rows) : Split{};
        if (!s.found) {
            t.nodes_[id].value = leaf_(rows);
            return id;
        }
        std::vector<std::size_t> left, right;
        for (std::size_t r : rows) (x_(r, s.feature) <= s.threshold ? left : right).push_back(r);
        rows.clear();
        rows.shrink_to_fit();
        const std::size_t l = build(t, left, depth + 1);
        const std::size_t r = build(t, right, depth + 1);
        t.nodes_[id].feature = static_cast<int>(s.feature);
        t.nodes_[id].threshold = s.threshold;
        t.nodes_[id].left = l;
        t.nodes_[id].right = r;
        return id;
    }

    Split best_split(const std::vector<std::size_t>& rows) {
        Split best;
        const std::size_t n = rows.size();
        if (n < 2 * opts_.min_leaf) return best;
        double sum = 0.0, sum_sq = 0.0;
        for (std::size_t r : rows) {
            sum += target_[r];
            sum_sq += target_[r] * target_[r];
        }
        const double parent = sum_sq - sum * sum / static_cast<double>(n);
        if (parent <= 1e-14 * std::max(1.0, sum_sq)) return best;

        std::size_t m = features_.size();
        if (opts_.max_features > 0 && opts_.max_features < m && rng_ != nullptr) {
            m = opts_.max_features;
            for (std::size_t i = 0; i < m; ++i) {
                std::uniform_int_distribution<std::size_t> pick(i, features_.size() - 1);
                std::swap(features_[i], features_[pick(*rng_)]);
            }
        }
        std::vector<std::size_t> order(rows);
        for (std::size_t fi = 0; fi < m; ++fi) {
            const std::size_t f = features_[fi];
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                const double xa = x_(a, f), xb = x_(b, f);
                return xa < xb || (xa == xb && a < b);
            });
            double ls = 0.0, lss = 0.0;
            for (std::size_t i = 0; i + 1 < n; ++i) {
                const double v = target_[order[i]];
                ls += v;
                lss += v * v;
                const std::size_t nl = i + 1, nr = n - nl;
                if (x_(order[i], f) == x_(order[i + 1], f)) continue;
                if (nl < opts_.min_leaf || nr < opts_.min_leaf) continue;
                const double rs = sum - ls, rss = sum_sq - lss;
                const double child = (lss - ls * ls / static_cast<double>(nl)) + (rss - rs * rs / static_cast<double>(nr));
                const double gain = parent - child;
                if (gain > best.gain + 1e-12 * parent) {
                    best = {true, f, x_(order[i], f), gain};
                }
            }
        }
        // Restore the canonical feature order so the draw sequence alone determines later splits.
        std::iota(features_.begin(), features_.end(), std::size_t{0});
        return best;
    }

    const Matrix& x_;
    std::span<const double> target_;
    GrowOptions opts_;
    LeafValue leaf_;
    std::mt19937_64* rng_;
    std::vector<std::size_t> features_;
};

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

class Forest final : public Learner {
public:
    explicit Forest(std::vector<Tree> trees) : trees_(std::move(trees)) {}

    Prediction predict(const Matrix& x) const override {
        Prediction p;
        p.labels.resize(x.rows());
        std::vector<double> scores(x.rows());
        for (std::size_t i = 0; i < x.rows(); ++i) {
            double s = 0.0;
            for (const auto& t : trees_) s += t.eval(x.row(i));
            scores[i] = s / static_cast<double>(trees_.size());
            p.labels[i] = scores[i] > 0.5 ? 1 : 0;
        }
        p.scores = std::move(scores);
        return p;
    }

private:
    std::vector<Tree> trees_;
};

class Boosted final : public Learner {
public:
    Boosted(double base, double rate, std::vector<Tree> trees) : base_(base), rate_(rate), trees_(std::move(trees)) {}

    Prediction predict(const Matrix& x) const override {
        Prediction p;
        p.labels.resize(x.rows());
        std::vector<double> scores(x.rows());
        for (std::size_t i = 0; i < x.rows(); ++i) {
            double f = base_;
            for (const auto& t : trees_) f += rate_ * t.eval(x.row(i));
            scores[i] = sigmoid(f);
            p.labels[i] = f > 0.0 ? 1 : 0;
        }
        p.scores = std::move(scores);
        return p;
    }

private:
    double base_;
    double rate_;
    std::vector<Tree> trees_;
};

std::size_t as_count(const Hyperparams& hp, const char* key) {
    const double v = hp.get(key);
    if (v < 0.0) throw InvalidParameter(std::string(key) + " must be non-negative");
    return static_cast<std::size_t>(v);
}

}  // namespace

std::unique_ptr<Learner> fit_decision_tree(const Matrix& x, std::span<const int> y, const Hyperparams& hp) {
    const std::vector<double> target(y.begin(), y.end());
    GrowOptions opts{as_count(hp, "max_depth"), std::max<std::size_t>(1, as_count(hp, "min_leaf")), 0};
    const auto mean = [&](std::span<const std::size_t> rows) {
        double s = 0.0;
        for (std::size_t r : rows) s += target[r];
        return s / static_cast<double>(rows.size());
    };
    Grower g(x, target, opts, mean, nullptr);
    std::vector<std::size_t> rows(x.rows());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    std::vector<Tree> trees;
    trees.push_back(g.grow(std::move(rows)));
    return std::make_unique<Forest>(std::move(trees));
}

std::unique_ptr<Learner> fit_random_forest(const Matrix& x, std::span<const int> y, const Hyperparams& hp,
                                           std::uint64_t seed, unsigned threads) {
    const std::vector<double> target(y.begin(), y.end());
    const std::size_t n_trees = std::max<std::size_t>(1, as_count(hp, "n_trees"));
    std::size_t max_features = as_count(hp, "max_features");
    if (max_features == 0) {
        max_features = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(x.cols())))));
    }
    const GrowOptions opts{as_count(hp, "max_depth"), std::max<std::size_t>(1, as_count(hp, "min_leaf")), max_features};
    const auto mean = [&](std::span<const std::size_t> rows) {
        double s = 0.0;
        for (std::size_t r : rows) s += target[r];
        return s / static_cast<double>(rows.size());
    };

    std::vector<Tree> trees(n_trees);
    parallel_for(n_trees, threads, [&](std::size_t t) {
        std::mt19937_64 rng(derive_seed(seed, t, Stream::classifier));
        std::uniform_int_distribution<std::size_t> pick(0, x.rows() - 1);
        std::vector<std::size_t> rows(x.rows());
        for (auto& r : rows) r = pick(rng);
        Grower g(x, target, opts, mean, &rng);
        trees[t] = g.grow(std::move(rows));
    });
    return std::make_unique<Forest>(std::move(trees));
}

// Logistic-loss boosting: each round fits a squared-error tree to y - p and sets leaves by one Newton step.
std::unique_ptr<Learner> fit_gradient_boost(const Matrix& x, std::span<const int> y, const Hyperparams& hp) {
    const std::size_t n = x.rows();
    const std::size_t n_trees = as_count(hp, "n_trees");
    const double rate = hp.get("learning_rate");
    const GrowOptions opts{std::max<std::size_t>(1, as_count(hp, "max_depth")),
                           std::max<std::size_t>(1, as_count(hp, "min_leaf")), 0};

    const double ones = static_cast<double>(std::count(y.begin(), y.end(), 1));
    const double prior = std::clamp(ones / static_cast<double>(n), 1e-6, 1.0 - 1e-6);
    const double base = std::log(prior / (1.0 - prior));

    std::vector<double> f(n, base), residual(n), hess(n);
    std::vector<Tree> trees;
    trees.reserve(n_trees);
    const auto newton = [&](std::span<const std::size_t> rows) {
        double num = 0.0, den = 0.0;
        for (std::size_t r : rows) {
            num += residual[r];
            den += hess[r];
        }
        return num / std::max(den, 1e-12);
    };
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), std::size_t{0});
    for (std::size_t round = 0; round < n_trees; ++round) {
        for (std::size_t i = 0; i < n; ++i) {
            const double p = sigmoid(f[i]);
            residual[i] = y[i] - p;
            hess[i] = p * (1.0 - p);
        }
        Grower g(x, residual, opts, newton, nullptr);
        Tree t = g.grow(all);
        for (std::size_t i = 0; i < n; ++i) f[i] += rate * t.eval(x.row(i));
        trees.push_back(std::move(t));
    }
    return std::make_unique<Boosted>(base, rate, std::move(trees));
}

}  // namespace bnsjump::ml::detail
