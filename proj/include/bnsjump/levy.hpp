#pragma once

// Compound-Poisson Lévy subordinators with Exponential(a) jump sizes, sampled exactly on a
// uniform time grid.

#include <cstddef>
#include <cstdint>
#include <vector>

namespace bnsjump::levy {

/// Compound Poisson subordinator: jumps arrive at `intensity` per unit time, sizes ~ Exp(jump_rate).
/// intensity == 0 is the degenerate subordinator Z == 0.
struct SubordinatorSpec {
    double intensity = 0.0;
    double jump_rate = 1.0;

    void validate() const;
};

struct Moments {
    double mean_rate = 0.0;
    double variance_rate = 0.0;
};

/// E[Z_1] = nu/a and Var[Z_1] = 2 nu / a^2.
Moments subordinator_moments(const SubordinatorSpec& spec);

/// Uniform grid t_k = t0 + k*dt, k = 0..n_steps.
struct TimeGrid {
    double t0 = 0.0;
    double dt = 1.0;
    std::size_t n_steps = 1;

    void validate() const;
    std::size_t size() const noexcept { return n_steps + 1; }
    double time(std::size_t k) const noexcept { return t0 + static_cast<double>(k) * dt; }
    double horizon() const noexcept { return static_cast<double>(n_steps) * dt; }
    double end() const noexcept { return time(n_steps); }

    friend bool operator==(const TimeGrid&, const TimeGrid&) = default;
};

struct JumpEvent {
    double time = 0.0;
    double size = 0.0;

    friend bool operator==(const JumpEvent&, const JumpEvent&) = default;
};

/// A sampled subordinator path: time-ordered events plus the running sum at each grid point.
struct JumpPath {
    TimeGrid grid;
    std::vector<JumpEvent> events;
    std::vector<double> cumulative;

    /// Increment of the cumulative sum over (t_k, t_{k+1}].
    double increment(std::size_t k) const { return cumulative[k + 1] - cumulative[k]; }

    /// Sum of sizes of events with time <= t.
    double value_at(double t) const;
    /// Number of events with time <= t.
    std::size_t count_until(double t) const;
    /// Sum of squared sizes of events with time <= t (realized quadratic variation).
    double quadratic_variation(double t) const;
};

/// Cumulative sums at grid points for a time-ordered event list.
std::vector<double> cumulate(const TimeGrid& grid, const std::vector<JumpEvent>& events);

/// Path of Z_{rate_scale * t} over the grid. The event count is Poisson(rate_scale*nu*T); times are
/// uniform order statistics on the horizon and sizes are i.i.d. Exp(a). Deterministic in `seed`.
JumpPath sample_subordinator_path(const SubordinatorSpec& spec, double rate_scale, const TimeGrid& grid,
                                  std::uint64_t seed);

/// Samples n paths; path i uses derive_seed(master_seed, i, stream_salt). Output does not depend on `threads`.
std::vector<JumpPath> sample_ensemble(const SubordinatorSpec& spec, double rate_scale, const TimeGrid& grid,
                                      std::uint64_t master_seed, std::size_t n_paths, std::uint64_t stream_salt,
                                      unsigned threads = 1);

/// w1*p1 + w2*p2 on a shared grid. Events are merged in time order (p1 before p2 on ties) with sizes
/// scaled by their weight; zero-weight contributions are dropped.
JumpPath combine_paths(const JumpPath& p1, const JumpPath& p2, double w1, double w2);

}  // namespace bnsjump::levy
