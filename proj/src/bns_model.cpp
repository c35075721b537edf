#include "bnsjump/bns_model.hpp"

#include "bnsjump/common.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace bnsjump::bns {

using levy::JumpPath;
using levy::TimeGrid;

void ModelParams::validate() const {
    if (!std::isfinite(mu) || !std::isfinite(beta)) throw InvalidParameter("mu and beta must be finite");
    if (!(rho <= 0.0) || !std::isfinite(rho)) throw InvalidParameter("rho must be finite and <= 0, got " + format_double(rho));
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw InvalidParameter("lambda must be > 0, got " + format_double(lambda));
    if (!(theta >= 0.0 && theta <= 1.0)) throw InvalidParameter("theta must lie in [0, 1], got " + format_double(theta));
    if (!(sigma0_sq > 0.0) || !std::isfinite(sigma0_sq)) throw InvalidParameter("sigma0_sq must be > 0, got " + format_double(sigma0_sq));
    spec_base.validate();
    spec_strong.validate();
    if (spec_strong.intensity < spec_base.intensity) {
        throw InvalidParameter("strong subordinator intensity must be >= base intensity");
    }
}

double VariancePath::floor_at(const ModelParams& params, const TimeGrid& grid, std::size_t k) {
    return std::exp(-params.lambda * (grid.time(k) - grid.t0)) * params.sigma0_sq;
}

namespace {

void require_same_grid(const JumpPath& a, const JumpPath& b, const char* where) {
    if (!(a.grid == b.grid)) throw IncompatibleGrid(std::string(where) + ": subordinator paths are on different grids");
}

// Exact OU solution at grid points for a given driving path.
std::vector<double> exact_variance(double lambda, double sigma0_sq, const JumpPath& driving) {
    const TimeGrid& grid = driving.grid;
    const double decay = std::exp(-lambda * grid.dt);
    std::vector<double> values(grid.size());
    double jump_part = 0.0;
    std::size_t next = 0;
    const auto& ev = driving.events;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double tk = grid.time(k);
        if (k > 0) jump_part *= decay;
        while (next < ev.size() && ev[next].time <= tk) {
            jump_part += std::exp(-lambda * (tk - ev[next].time)) * ev[next].size;
            ++next;
        }
        values[k] = std::exp(-lambda * (tk - grid.t0)) * sigma0_sq + jump_part;
    }
    return values;
}

std::vector<double> brownian_draws(std::uint64_t seed, std::size_t n) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> out(n);
    for (auto& v : out) v = normal(rng);
    return out;
}

void check_window(const VariancePath& var_path, double t, double s) {
    const auto& g = var_path.grid;
    if (!(s > g.t0) || !(t > s) || t > g.end() + 1e-12 * std::max(1.0, std::abs(g.end()))) {
        throw DomainError("correlation requires t0 < s < t <= T, got s=" + format_double(s) + " t=" + format_double(t));
    }
}

}  // namespace

VariancePath simulate_variance_path(const ModelParams& params, const JumpPath& z, const JumpPath& zb) {
    params.validate();
    require_same_grid(z, zb, "simulate_variance_path");
    VariancePath out;
    out.grid = z.grid;
    out.driving = levy::combine_paths(z, zb, 1.0 - params.theta, params.theta);
    out.values = exact_variance(params.lambda, params.sigma0_sq, out.driving);
    return out;
}

std::vector<double> simulate_variance_euler(const ModelParams& params, const JumpPath& z, const JumpPath& zb) {
    params.validate();
    require_same_grid(z, zb, "simulate_variance_euler");
    const JumpPath driving = levy::combine_paths(z, zb, 1.0 - params.theta, params.theta);
    const TimeGrid& grid = driving.grid;
    std::vector<double> v(grid.size());
    v[0] = params.sigma0_sq + driving.cumulative[0];
    for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
        v[k + 1] = v[k] * (1.0 - params.lambda * grid.dt) + driving.increment(k);
    }
    return v;
}

LogPricePath simulate_log_price(const ModelParams& params, const VariancePath& var_path, const JumpPath& z,
                                const JumpPath& zb, std::uint64_t seed, const LogPriceOptions& opts) {
    params.validate();
    require_same_grid(z, zb, "simulate_log_price");
    if (!(var_path.grid == z.grid)) throw IncompatibleGrid("simulate_log_price: variance path grid differs");
    if (!(opts.s0 > 0.0)) throw InvalidParameter("s0 must be positive");

    const TimeGrid& grid = z.grid;
    const double dt = grid.dt;
    const double sqrt_dt = std::sqrt(dt);
    const std::vector<double> dw = opts.brownian ? brownian_draws(seed, grid.n_steps) : std::vector<double>(grid.n_steps, 0.0);
    const double w_base = 1.0 - params.theta;
    const double w_strong = params.theta;

    LogPricePath out;
    out.grid = grid;
    out.s0 = opts.s0;
    out.x_true.resize(grid.size());
    out.x_true[0] = 0.0;
    for (std::size_t k = 0; k < grid.n_steps; ++k) {
        const double var = var_path.values[k];
        const double jump = params.rho * (w_base * z.increment(k) + w_strong * zb.increment(k));
        const double next = out.x_true[k] + (params.mu + params.beta * var) * dt + std::sqrt(var) * sqrt_dt * dw[k] + jump;
        if (!std::isfinite(next)) throw NumericOverflow("log price became non-finite at step " + std::to_string(k + 1));
        out.x_true[k + 1] = next;
    }
    return out;
}

std::pair<VariancePath, LogPricePath> simulate_classical(const ModelParams& params, const JumpPath& z,
                                                         std::uint64_t brownian_seed, const LogPriceOptions& opts) {
    params.validate();
    if (!(opts.s0 > 0.0)) throw InvalidParameter("s0 must be positive");
    const TimeGrid& grid = z.grid;

    VariancePath var;
    var.grid = grid;
    var.driving = z;
    var.values = exact_variance(params.lambda, params.sigma0_sq, z);

    const std::vector<double> dw = opts.brownian ? brownian_draws(brownian_seed, grid.n_steps) : std::vector<double>(grid.n_steps, 0.0);
    LogPricePath x;
    x.grid = grid;
    x.s0 = opts.s0;
    x.x_true.assign(grid.size(), 0.0);
    const double sqrt_dt = std::sqrt(grid.dt);
    for (std::size_t k = 0; k < grid.n_steps; ++k) {
        const double s2 = var.values[k];
        x.x_true[k + 1] = x.x_true[k] + (params.mu + params.beta * s2) * grid.dt + std::sqrt(s2) * sqrt_dt * dw[k] +
                          params.rho * z.increment(k);
        if (!std::isfinite(x.x_true[k + 1])) throw NumericOverflow("classical log price became non-finite");
    }
    return {std::move(var), std::move(x)};
}

LogPricePath apply_noise(const LogPricePath& path, const NoiseSpec& noise, std::uint64_t seed) {
    if (!(noise.std >= 0.0) || !std::isfinite(noise.std)) throw InvalidParameter("noise std must be >= 0");
    LogPricePath out = path;
    std::vector<double> eps(path.x_true.size(), 0.0);
    if (noise.std > 0.0) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> normal(0.0, noise.std);
        for (auto& e : eps) e = normal(rng);
    }
    std::vector<double> observed(path.x_true.size());
    for (std::size_t k = 0; k < observed.size(); ++k) observed[k] = path.x_true[k] + eps[k];
    out.noise = std::move(eps);
    out.x_observed = std::move(observed);
    return out;
}

std::vector<double> price_series(const LogPricePath& path, bool use_observed) {
    std::vector<double> out;
    if (use_observed) {
        if (!path.x_observed || !path.noise) throw InvalidParameter("price_series: observed series or noise missing");
        out.resize(path.x_observed->size());
        for (std::size_t k = 0; k < out.size(); ++k) out[k] = path.s0 * std::exp((*path.x_observed)[k] - (*path.noise)[k]);
    } else {
        if (path.x_true.empty()) throw InvalidParameter("price_series: true log price missing");
        out.resize(path.x_true.size());
        for (std::size_t k = 0; k < out.size(); ++k) out[k] = path.s0 * std::exp(path.x_true[k]);
    }
    return out;
}

double instantaneous_variance_rate(const ModelParams& params, double sigma_sq) {
    const double var_base = levy::subordinator_moments(params.spec_base).variance_rate;
    const double var_strong = levy::subordinator_moments(params.spec_strong).variance_rate;
    const double r2 = params.rho * params.rho;
    const double wb = 1.0 - params.theta;
    return sigma_sq + r2 * wb * wb * params.lambda * var_base + r2 * params.theta * params.theta * params.lambda * var_strong;
}

double integrated_variance(const VariancePath& var_path, double t) {
    const auto& g = var_path.grid;
    const auto& v = var_path.values;
    const double u = (t - g.t0) / g.dt;
    if (u <= 0.0) return 0.0;
    if (u >= static_cast<double>(g.n_steps) - 1e-9) {
        double sum = 0.0;
        for (std::size_t k = 0; k < g.n_steps; ++k) sum += 0.5 * (v[k] + v[k + 1]) * g.dt;
        return sum;
    }
    auto whole = static_cast<std::size_t>(std::floor(u));
    double frac = u - static_cast<double>(whole);
    if (frac > 1.0 - 1e-9) {
        ++whole;
        frac = 0.0;
    } else if (frac < 1e-9) {
        frac = 0.0;
    }
    double sum = 0.0;
    for (std::size_t k = 0; k < whole; ++k) sum += 0.5 * (v[k] + v[k + 1]) * g.dt;
    if (frac > 0.0) {
        const double v_end = v[whole] + frac * (v[whole + 1] - v[whole]);
        sum += 0.5 * (v[whole] + v_end) * frac * g.dt;
    }
    return sum;
}

double realized_jump_measure(const JumpPath& path, double s) { return path.quadratic_variation(s); }

double correlation_alpha(const VariancePath& var_path, const ModelParams& params, double v) {
    const double var_base = levy::subordinator_moments(params.spec_base).variance_rate;
    const double var_strong = levy::subordinator_moments(params.spec_strong).variance_rate;
    const double wb = 1.0 - params.theta;
    const double elapsed = v - var_path.grid.t0;
    return integrated_variance(var_path, v) +
           elapsed * params.rho * params.rho * params.lambda * (wb * wb * var_base + params.theta * params.theta * var_strong);
}

double correlation_classical(const VariancePath& var_path, const JumpPath& z, const ModelParams& params, double t,
                             double s) {
    check_window(var_path, t, s);
    const double var_z = levy::subordinator_moments(params.spec_base).variance_rate;
    const double r2 = params.rho * params.rho;
    const double int_s = integrated_variance(var_path, s);
    const double int_t = integrated_variance(var_path, t);
    const double t0 = var_path.grid.t0;
    const double numerator = int_s + r2 * realized_jump_measure(z, s);
    const double denom_t = int_t + (t - t0) * r2 * params.lambda * var_z;
    const double denom_s = int_s + (s - t0) * r2 * params.lambda * var_z;
    return numerator / std::sqrt(denom_t * denom_s);
}

double correlation_generalized(const VariancePath& var_path, const JumpPath& z, const JumpPath& zb,
                               const ModelParams& params, double t, double s) {
    check_window(var_path, t, s);
    const double r2 = params.rho * params.rho;
    const double wb = 1.0 - params.theta;
    const double numerator = integrated_variance(var_path, s) + r2 * wb * wb * realized_jump_measure(z, s) +
                             r2 * params.theta * params.theta * realized_jump_measure(zb, s);
    return numerator / std::sqrt(correlation_alpha(var_path, params, t) * correlation_alpha(var_path, params, s));
}

SimulatedPath simulate_path(const ModelParams& params, const SimulationConfig& cfg, std::uint64_t master_seed,
                            std::size_t path_index) {
    params.validate();
    SimulatedPath out;
    out.z = levy::sample_subordinator_path(params.spec_base, params.lambda, cfg.grid,
                                           derive_seed(master_seed, path_index, Stream::base_subordinator));
    out.zb = levy::sample_subordinator_path(params.spec_strong, params.lambda, cfg.grid,
                                            derive_seed(master_seed, path_index, Stream::strong_subordinator));
    out.variance = simulate_variance_path(params, out.z, out.zb);
    out.log_price = simulate_log_price(params, out.variance, out.z, out.zb,
                                       derive_seed(master_seed, path_index, Stream::brownian), cfg.log_price);
    if (cfg.noise.std > 0.0) {
        out.log_price = apply_noise(out.log_price, cfg.noise, derive_seed(master_seed, path_index, Stream::noise));
    }
    return out;
}

std::vector<SimulatedPath> simulate_ensemble(const ModelParams& params, const SimulationConfig& cfg,
                                             std::uint64_t master_seed, std::size_t n_paths, unsigned threads) {
    std::vector<SimulatedPath> out(n_paths);
    parallel_for(n_paths, threads, [&](std::size_t i) { out[i] = simulate_path(params, cfg, master_seed, i); });
    return out;
}

}  // namespace bnsjump::bns
