#pragma once

// Classical and generalized Barndorff-Nielsen–Shephard dynamics.
//
//   dX_t      = (mu + beta*sigma_t^2) dt + sigma_t dW_t + rho * ((1-theta) dZ_{lambda t} + theta dZ^(b)_{lambda t})
//   dsigma_t^2 = -lambda sigma_t^2 dt + (1-theta) dZ_{lambda t} + theta dZ^(b)_{lambda t}
//
// theta = 0 is the classical single-subordinator model. Observed log prices carry i.i.d. noise.

#include "bnsjump/levy.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace bnsjump::bns {

struct ModelParams {
    double mu = 0.0;
    double beta = 0.0;
    double rho = 0.0;       // jump leverage, <= 0
    double lambda = 1.0;    // mean reversion and subordinator time change, > 0
    double theta = 0.0;     // deterministic mixing weight in [0, 1]
    double sigma0_sq = 1.0; // initial variance, > 0
    levy::SubordinatorSpec spec_base;    // Z
    levy::SubordinatorSpec spec_strong;  // Z^(b), intensity >= spec_base.intensity

    void validate() const;
};

struct VariancePath {
    levy::TimeGrid grid;
    std::vector<double> values;
    levy::JumpPath driving;

    /// e^{-lambda (t_k - t0)} sigma0^2, the deterministic lower bound of values[k].
    static double floor_at(const ModelParams& params, const levy::TimeGrid& grid, std::size_t k);
};

struct NoiseSpec {
    double std = 0.0;  // zero-mean Gaussian
};

struct LogPricePath {
    levy::TimeGrid grid;
    std::vector<double> x_true;
    std::optional<std::vector<double>> x_observed;
    std::optional<std::vector<double>> noise;
    double s0 = 1.0;
};

struct LogPriceOptions {
    bool brownian = true;
    double s0 = 1.0;
};

/// Exact solution of the variance SDE evaluated at grid points:
/// sigma^2(t_k) = e^{-lambda t_k} sigma0^2 + sum_{tau_i <= t_k} e^{-lambda (t_k - tau_i)} y_i over the
/// combined driver (1-theta) Z + theta Z^(b).
VariancePath simulate_variance_path(const ModelParams& params, const levy::JumpPath& z, const levy::JumpPath& zb);

/// First-order Euler scheme for the same SDE: v_{k+1} = v_k (1 - lambda dt) + dZbar_k. Used as a
/// convergence reference against the exact solution.
std::vector<double> simulate_variance_euler(const ModelParams& params, const levy::JumpPath& z,
                                            const levy::JumpPath& zb);

/// Euler–Maruyama for the log price with left-point sigma_k; x_true[0] = 0. The Brownian increments
/// come from `seed` alone.
LogPricePath simulate_log_price(const ModelParams& params, const VariancePath& var_path, const levy::JumpPath& z,
                                const levy::JumpPath& zb, std::uint64_t seed, const LogPriceOptions& opts = {});

/// Classical model written out directly (single subordinator, theta ignored). Shares the Brownian
/// stream convention with simulate_log_price so the two agree path-for-path at theta = 0.
std::pair<VariancePath, LogPricePath> simulate_classical(const ModelParams& params, const levy::JumpPath& z,
                                                         std::uint64_t brownian_seed,
                                                         const LogPriceOptions& opts = {});

/// Fills noise and x_observed = x_true + noise with i.i.d. N(0, std^2) draws from `seed`.
LogPricePath apply_noise(const LogPricePath& path, const NoiseSpec& noise, std::uint64_t seed);

/// s0 * exp(x_true), or s0 * exp(x_observed - noise) when use_observed is set.
std::vector<double> price_series(const LogPricePath& path, bool use_observed);

/// sigma^2 + rho^2 (1-theta)^2 lambda Var[Z_1] + rho^2 theta^2 lambda Var[Z^(b)_1].
double instantaneous_variance_rate(const ModelParams& params, double sigma_sq);

/// Trapezoid integral of sigma^2 from grid.t0 to t (linear interpolation inside the last cell).
double integrated_variance(const VariancePath& var_path, double t);

/// alpha(v) = int_0^v sigma^2 + v rho^2 lambda ((1-theta)^2 Var Z_1 + theta^2 Var Z^(b)_1).
double correlation_alpha(const VariancePath& var_path, const ModelParams& params, double v);

/// Realized jump measure J(s) of a subordinator path: the quadratic variation sum_{tau_i <= s} y_i^2.
double realized_jump_measure(const levy::JumpPath& path, double s);

/// Classical Corr(X_t, X_s), t > s, as a path functional of var_path and z.
double correlation_classical(const VariancePath& var_path, const levy::JumpPath& z, const ModelParams& params,
                             double t, double s);

/// Generalized Corr(X_t, X_s), t > s, with theta-weighted jump measures and the alpha normalizer.
double correlation_generalized(const VariancePath& var_path, const levy::JumpPath& z, const levy::JumpPath& zb,
                               const ModelParams& params, double t, double s);

struct SimulationConfig {
    levy::TimeGrid grid;
    NoiseSpec noise;
    LogPriceOptions log_price;
};

struct SimulatedPath {
    levy::JumpPath z;
    levy::JumpPath zb;
    VariancePath variance;
    LogPricePath log_price;
};

/// One full path. Every random driver uses its own stream derived from (master_seed, path_index).
SimulatedPath simulate_path(const ModelParams& params, const SimulationConfig& cfg, std::uint64_t master_seed,
                            std::size_t path_index);

std::vector<SimulatedPath> simulate_ensemble(const ModelParams& params, const SimulationConfig& cfg,
                                             std::uint64_t master_seed, std::size_t n_paths, unsigned threads = 1);

}  // namespace bnsjump::bns
