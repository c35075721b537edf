#include "bnsjump/classifiers.hpp"

#include "bnsjump/common.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>

namespace bnsjump::ml::detail {

namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) s += (a[j] - b[j]) * (a[j] - b[j]);
    return s;
}

class Knn final : public Learner {
public:
    Knn(Matrix x, std::vector<int> y, std::size_t k) : x_(std::move(x)), y_(std::move(y)), k_(std::min(k, y_.size())) {}

    Prediction predict(const Matrix& q) const override {
        Prediction p;
        p.labels.resize(q.rows());
        std::vector<double> scores(q.rows());
        std::vector<std::pair<double, std::size_t>> dist(x_.rows());
        for (std::size_t i = 0; i < q.rows(); ++i) {
            for (std::size_t t = 0; t < x_.rows(); ++t) dist[t] = {squared_distance(q.row(i), x_.row(t)), t};
            // Ties in distance go to the earlier training row.
            std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k_), dist.end());
            std::size_t ones = 0;
            for (std::size_t m = 0; m < k_; ++m) ones += y_[dist[m].second] == 1 ? 1 : 0;
            const std::size_t zeros = k_ - ones;
            scores[i] = static_cast<double>(ones) / static_cast<double>(k_);
            if (ones != zeros) p.labels[i] = ones > zeros ? 1 : 0;
            else p.labels[i] = y_[dist[0].second];
        }
        p.scores = std::move(scores);
        return p;
    }

private:
    Matrix x_;
    std::vector<int> y_;
    std::size_t k_;
};

class NearestCentroid final : public Learner {
public:
    NearestCentroid(Matrix centroids, std::vector<int> labels) : c_(std::move(centroids)), labels_(std::move(labels)) {}

    Prediction predict(const Matrix& q) const override {
        Prediction p;
        p.labels.resize(q.rows());
        for (std::size_t i = 0; i < q.rows(); ++i) p.labels[i] = labels_[nearest(c_, q.row(i))];
        return p;
    }

    static std::size_t nearest(const Matrix& c, std::span<const double> v) {
        std::size_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t m = 0; m < c.rows(); ++m) {
            const double d = squared_distance(c.row(m), v);
            if (d < best_d) {
                best_d = d;
                best = m;
            }
        }
        return best;
    }

private:
    Matrix c_;
    std::vector<int> labels_;
};

struct Clustering {
    Matrix centroids;
    std::vector<std::size_t> assignment;
    double inertia = std::numeric_limits<double>::infinity();
};

// k-means++ seeding followed by Lloyd iterations.
Clustering lloyd(const Matrix& x, std::size_t k, std::size_t iterations, std::mt19937_64& rng) {
    const std::size_t n = x.rows(), d = x.cols();
    Clustering c;
    c.centroids = Matrix(k, d);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::size_t first = pick(rng);
    std::copy(x.row(first).begin(), x.row(first).end(), c.centroids.row(0).begin());
    std::vector<double> d2(n);
    for (std::size_t m = 1; m < k; ++m) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t q = 0; q < m; ++q) best = std::min(best, squared_distance(x.row(i), c.centroids.row(q)));
            d2[i] = best;
            total += best;
        }
        std::size_t chosen = pick(rng);
        if (total > 0.0) {
            double u = std::uniform_real_distribution<double>(0.0, total)(rng);
            for (std::size_t i = 0; i < n; ++i) {
                u -= d2[i];
                if (u <= 0.0 && d2[i] > 0.0) {
                    chosen = i;
                    break;
                }
            }
        }
        std::copy(x.row(chosen).begin(), x.row(chosen).end(), c.centroids.row(m).begin());
    }

    c.assignment.assign(n, 0);
    std::vector<std::size_t> counts(k);
    for (std::size_t it = 0; it < iterations; ++it) {
        bool changed = it == 0;
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t a = NearestCentroid::nearest(c.centroids, x.row(i));
            if (a != c.assignment[i]) changed = true;
            c.assignment[i] = a;
        }
        if (!changed) break;
        Matrix sums(k, d);
        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t i = 0; i < n; ++i) {
            ++counts[c.assignment[i]];
            for (std::size_t j = 0; j < d; ++j) sums(c.assignment[i], j) += x(i, j);
        }
        for (std::size_t m = 0; m < k; ++m) {
            if (counts[m] == 0) continue;  // empty cluster keeps its centroid
            for (std::size_t j = 0; j < d; ++j) c.centroids(m, j) = sums(m, j) / static_cast<double>(counts[m]);
        }
    }
    c.inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        c.assignment[i] = NearestCentroid::nearest(c.centroids, x.row(i));
        c.inertia += squared_distance(x.row(i), c.centroids.row(c.assignment[i]));
    }
    return c;
}

}  // namespace

std::unique_ptr<Learner> fit_knn(const Matrix& x, std::span<const int> y, const Hyperparams& hp) {
    const double k = hp.get("k");
    if (k < 1.0) throw InvalidParameter("knn k must be at least 1");
    return std::make_unique<Knn>(x, std::vector<int>(y.begin(), y.end()), static_cast<std::size_t>(k));
}

std::unique_ptr<Learner> fit_kmeans(const Matrix& x, std::span<const int> y, const Hyperparams& hp, std::uint64_t seed) {
    const double kd = hp.get("k");
    if (kd < 1.0) throw InvalidParameter("kmeans k must be at least 1");
    const std::size_t k = std::min(static_cast<std::size_t>(kd), x.rows());
    const auto iterations = static_cast<std::size_t>(hp.get("iterations"));
    const auto restarts = std::max<std::size_t>(1, static_cast<std::size_t>(hp.get("restarts")));

    Clustering best;
    for (std::size_t r = 0; r < restarts; ++r) {
        std::mt19937_64 rng(derive_seed(seed, r, Stream::classifier));
        Clustering c = lloyd(x, k, iterations, rng);
        if (c.inertia < best.inertia) best = std::move(c);
    }

    const std::size_t ones_total = static_cast<std::size_t>(std::count(y.begin(), y.end(), 1));
    const int majority = 2 * ones_total > y.size() ? 1 : 0;
    std::vector<std::size_t> ones(k, 0), sizes(k, 0);
    for (std::size_t i = 0; i < y.size(); ++i) {
        ++sizes[best.assignment[i]];
        ones[best.assignment[i]] += y[i] == 1 ? 1 : 0;
    }
    std::vector<int> labels(k);
    for (std::size_t m = 0; m < k; ++m) {
        const std::size_t zeros = sizes[m] - ones[m];
        labels[m] = ones[m] == zeros ? majority : (ones[m] > zeros ? 1 : 0);
    }
    return std::make_unique<NearestCentroid>(std::move(best.centroids), std::move(labels));
}

}  // namespace bnsjump::ml::detail
