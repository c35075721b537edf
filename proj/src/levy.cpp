#include "bnsjump/levy.hpp"

#include "bnsjump/common.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace bnsjump::levy {

void SubordinatorSpec::validate() const {
    if (!(intensity >= 0.0) || !std::isfinite(intensity)) {
        throw InvalidParameter("subordinator intensity must be finite and >= 0, got " + format_double(intensity));
    }
    if (!(jump_rate > 0.0) || !std::isfinite(jump_rate)) {
        throw InvalidParameter("subordinator jump_rate must be finite and > 0, got " + format_double(jump_rate));
    }
}

Moments subordinator_moments(const SubordinatorSpec& spec) {
    spec.validate();
    return {spec.intensity / spec.jump_rate, 2.0 * spec.intensity / (spec.jump_rate * spec.jump_rate)};
}

void TimeGrid::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidParameter("grid dt must be positive, got " + format_double(dt));
    if (n_steps == 0) throw InvalidParameter("grid needs at least one step");
    if (!std::isfinite(t0)) throw InvalidParameter("grid t0 must be finite");
}

double JumpPath::value_at(double t) const {
    double sum = 0.0;
    for (const auto& e : events) {
        if (e.time > t) break;
        sum += e.size;
    }
    return sum;
}

std::size_t JumpPath::count_until(double t) const {
    auto it = std::upper_bound(events.begin(), events.end(), t,
                               [](double v, const JumpEvent& e) { return v < e.time; });
    return static_cast<std::size_t>(it - events.begin());
}

double JumpPath::quadratic_variation(double t) const {
    double sum = 0.0;
    for (const auto& e : events) {
        if (e.time > t) break;
        sum += e.size * e.size;
    }
    return sum;
}

std::vector<double> cumulate(const TimeGrid& grid, const std::vector<JumpEvent>& events) {
    std::vector<double> cum(grid.size(), 0.0);
    std::size_t next = 0;
    double running = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double tk = grid.time(k);
        while (next < events.size() && events[next].time <= tk) running += events[next++].size;
        cum[k] = running;
    }
    return cum;
}

JumpPath sample_subordinator_path(const SubordinatorSpec& spec, double rate_scale, const TimeGrid& grid,
                                  std::uint64_t seed) {
    spec.validate();
    grid.validate();
    if (!(rate_scale > 0.0) || !std::isfinite(rate_scale)) {
        throw InvalidParameter("rate scale lambda must be positive, got " + format_double(rate_scale));
    }

    JumpPath path;
    path.grid = grid;
    const double mean_count = rate_scale * spec.intensity * grid.horizon();
    if (mean_count > 0.0) {
        std::mt19937_64 rng(seed);
        std::poisson_distribution<long long> count_dist(mean_count);
        const auto count = static_cast<std::size_t>(count_dist(rng));
        std::uniform_real_distribution<double> when(0.0, grid.horizon());
        std::exponential_distribution<double> size_dist(spec.jump_rate);

        path.events.reserve(count);
        for (std::size_t i = 0; i < count; ++i) {
            double tau = grid.t0 + when(rng);
            double y = size_dist(rng);
            // Exp sizes are a.s. positive; guard the measure-zero draw so the size invariant holds.
            if (!(y > 0.0)) y = std::numeric_limits<double>::min();
            path.events.push_back({tau, y});
        }
        std::stable_sort(path.events.begin(), path.events.end(),
                         [](const JumpEvent& a, const JumpEvent& b) { return a.time < b.time; });
    }
    path.cumulative = cumulate(grid, path.events);
    return path;
}

std::vector<JumpPath> sample_ensemble(const SubordinatorSpec& spec, double rate_scale, const TimeGrid& grid,
                                      std::uint64_t master_seed, std::size_t n_paths, std::uint64_t stream_salt,
                                      unsigned threads) {
    std::vector<JumpPath> out(n_paths);
    parallel_for(n_paths, threads, [&](std::size_t i) {
        out[i] = sample_subordinator_path(spec, rate_scale, grid, derive_seed(master_seed, i, stream_salt));
    });
    return out;
}

JumpPath combine_paths(const JumpPath& p1, const JumpPath& p2, double w1, double w2) {
    if (!(p1.grid == p2.grid)) throw IncompatibleGrid("combine_paths: paths are on different grids");
    if (!(w1 >= 0.0) || !(w2 >= 0.0)) throw InvalidParameter("combine_paths: weights must be nonnegative");

    JumpPath out;
    out.grid = p1.grid;
    out.events.reserve(p1.events.size() + p2.events.size());
    std::size_t i = 0, j = 0;
    const auto push = [&](const JumpEvent& e, double w) {
        if (w > 0.0) out.events.push_back({e.time, w * e.size});
    };
    while (i < p1.events.size() || j < p2.events.size()) {
        if (j == p2.events.size() || (i < p1.events.size() && p1.events[i].time <= p2.events[j].time)) {
            push(p1.events[i++], w1);
        } else {
            push(p2.events[j++], w2);
        }
    }

    out.cumulative.resize(out.grid.size());
    for (std::size_t k = 0; k < out.cumulative.size(); ++k) {
        out.cumulative[k] = w1 * p1.cumulative[k] + w2 * p2.cumulative[k];
    }
    return out;
}

}  // namespace bnsjump::levy
