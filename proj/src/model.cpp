#include "swing/model.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "swing/errors.hpp"
#include "swing/normal.hpp"
#include "swing/parallel.hpp"
#include "swing/rng.hpp"

namespace swing {

namespace {

// (1 - exp(-a t)) / a, continuous at a = 0.
double decay_integral(double a, double t) {
    if (std::abs(a * t) < 1e-8) return t * (1.0 - 0.5 * a * t);
    return -std::expm1(-a * t) / a;
}

}  // namespace

void TwoFactorParams::validate() const {
    SWING_REQUIRE(alpha1 > 0.0 && alpha2 > 0.0, "mean-reversion speeds must be positive");
    SWING_REQUIRE(sigma1 >= 0.0 && sigma2 >= 0.0, "volatilities must be non-negative");
    SWING_REQUIRE(rho >= -1.0 && rho <= 1.0, "correlation must lie in [-1, 1]");
    SWING_REQUIRE(n >= 1, "model needs at least one date");
    SWING_REQUIRE(T > 0.0, "horizon must be positive");
    SWING_REQUIRE(forward.size() == static_cast<std::size_t>(n), "one forward per date expected");
    SWING_REQUIRE(strikes.size() == static_cast<std::size_t>(n), "one strike per date expected");
    for (double f : forward) SWING_REQUIRE(f > 0.0 && std::isfinite(f), "forward curve must be strictly positive");
    for (double k : strikes) SWING_REQUIRE(std::isfinite(k), "strikes must be finite");
}

TwoFactorParams TwoFactorParams::reference(double forward, double strike) {
    TwoFactorParams p;
    p.forward.assign(static_cast<std::size_t>(p.n), forward);
    p.strikes.assign(static_cast<std::size_t>(p.n), strike);
    return p;
}

double variance_lambda(const TwoFactorParams& p, double t) {
    const auto c = structure_covariance(p, t);
    return c[0] + c[3] + 2.0 * c[1];
}

std::array<double, 4> structure_covariance(const TwoFactorParams& p, double t) {
    SWING_REQUIRE(t >= 0.0, "time must be non-negative");
    const double v1 = p.sigma1 * p.sigma1 * decay_integral(2.0 * p.alpha1, t);
    const double v2 = p.sigma2 * p.sigma2 * decay_integral(2.0 * p.alpha2, t);
    const double c12 = p.rho * p.sigma1 * p.sigma2 * decay_integral(p.alpha1 + p.alpha2, t);
    return {v1, c12, c12, v2};
}

std::array<double, 4> innovation_covariance(const TwoFactorParams& p, double dt) {
    const double v1 = decay_integral(2.0 * p.alpha1, dt);
    const double v2 = decay_integral(2.0 * p.alpha2, dt);
    const double c12 = p.rho * decay_integral(p.alpha1 + p.alpha2, dt);
    return {v1, c12, c12, v2};
}

std::array<double, 3> cholesky2(const std::array<double, 4>& cov) {
    const double l11 = std::sqrt(std::max(cov[0], 0.0));
    const double l21 = l11 > 0.0 ? cov[2] / l11 : 0.0;
    const double l22 = std::sqrt(std::max(cov[3] - l21 * l21, 0.0));
    return {l11, l21, l22};
}

FactorSimulator::FactorSimulator(const TwoFactorParams& p, std::uint64_t seed)
    : params_(p),
      seed_(seed),
      decay1_(std::exp(-p.alpha1 * p.dt())),
      decay2_(std::exp(-p.alpha2 * p.dt())),
      chol_(cholesky2(innovation_covariance(p, p.dt()))) {}

void FactorSimulator::simulate_block(
    std::size_t b, std::size_t n_paths,
    const std::function<void(std::size_t, std::span<const FactorState>)>& visit) const {
    Engine eng(stream_seed(seed_, b));
    std::normal_distribution<double> gauss;
    const std::size_t steps = static_cast<std::size_t>(params_.n);
    std::vector<FactorState> states(steps + 1);
    const std::size_t begin = b * kBlockPaths;
    const std::size_t end = std::min(n_paths, begin + kBlockPaths);
    for (std::size_t path = begin; path < end; ++path) {
        FactorState x{};
        states[0] = x;
        for (std::size_t s = 1; s <= steps; ++s) {
            const double z1 = gauss(eng);
            const double z2 = gauss(eng);
            x.x1 = decay1_ * x.x1 + chol_[0] * z1;
            x.x2 = decay2_ * x.x2 + chol_[1] * z1 + chol_[2] * z2;
            states[s] = x;
        }
        visit(path, states);
    }
}

std::vector<FactorState> simulate_factor_paths(const TwoFactorParams& p, std::size_t n_paths,
                                               std::uint64_t seed, unsigned threads) {
    SWING_REQUIRE(n_paths >= 1, "need at least one path");
    p.validate();
    const FactorSimulator sim(p, seed);
    const std::size_t width = static_cast<std::size_t>(p.n) + 1;
    std::vector<FactorState> out(n_paths * width);
    parallel_blocks(sim.block_count(n_paths), threads, [&](std::size_t b) {
        sim.simulate_block(b, n_paths, [&](std::size_t path, std::span<const FactorState> states) {
            std::copy(states.begin(), states.end(), out.begin() + static_cast<std::ptrdiff_t>(path * width));
        });
    });
    return out;
}

SpotPayoff spot_and_payoff(const TwoFactorParams& p, int k, FactorState y) {
    const auto z = structure_state(p, y);
    return structure_payoff(p, k, z);
}

std::array<double, 2> structure_state(const TwoFactorParams& p, FactorState y) {
    return {p.sigma1 * y.x1, p.sigma2 * y.x2};
}

SpotPayoff structure_payoff(const TwoFactorParams& p, int k, std::span<const double> z) {
    SWING_REQUIRE(k >= 0 && k < p.n, "date index out of range");
    const double t = p.date(k);
    const auto idx = static_cast<std::size_t>(k);
    const double spot = p.forward[idx] * std::exp(z[0] + z[1] - 0.5 * variance_lambda(p, t));
    return {spot, std::exp(-p.r * t) * (spot - p.strikes[idx])};
}

double black_call(double forward, double strike, double lambda) {
    SWING_REQUIRE(forward > 0.0, "forward must be positive");
    SWING_REQUIRE(strike >= 0.0, "strike must be non-negative");
    if (strike == 0.0) return forward;
    if (lambda <= 0.0) return std::max(forward - strike, 0.0);
    const double sd = std::sqrt(lambda);
    const double d1 = (std::log(forward / strike) + 0.5 * lambda) / sd;
    return forward * norm_cdf(d1) - strike * norm_cdf(d1 - sd);
}

double closed_form_strip(const TwoFactorParams& p) {
    p.validate();
    double total = 0.0;
    for (int k = 0; k < p.n; ++k) {
        const double t = p.date(k);
        const auto idx = static_cast<std::size_t>(k);
        total += std::exp(-p.r * t) * black_call(p.forward[idx], p.strikes[idx], variance_lambda(p, t));
    }
    return total;
}

double swap_value(const TwoFactorParams& p) {
    p.validate();
    double total = 0.0;
    for (int k = 0; k < p.n; ++k) {
        const auto idx = static_cast<std::size_t>(k);
        total += std::exp(-p.r * p.date(k)) * (p.forward[idx] - p.strikes[idx]);
    }
    return total;
}

}  // namespace swing
