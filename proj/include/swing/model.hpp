#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace swing {

/// Two-factor Gaussian model of the forward curve:
///   S_t = F_{0,t} exp(sigma1 X1_t + sigma2 X2_t - Lambda_t / 2),
///   X^i_t = int_0^t exp(-alpha_i (t - s)) dW^i_s,  d<W1,W2> = rho dt.
/// Exercise dates are t_k = k T / n, k = 0..n-1.
struct TwoFactorParams {
    double alpha1 = 0.21;
    double alpha2 = 5.4;
    double sigma1 = 0.36;
    double sigma2 = 1.11;
    double rho = -0.11;
    double r = 0.0;
    double T = 30.0 / 365.0;
    int n = 30;
    std::vector<double> forward;  // F_{0,t_k}, one per date
    std::vector<double> strikes;  // K_k, one per date

    /// Throws ContractViolation when an invariant fails.
    void validate() const;
    [[nodiscard]] double dt() const { return T / n; }
    [[nodiscard]] double date(int k) const { return k * dt(); }

    /// Parameter set used in the numerical illustration, flat curves.
    static TwoFactorParams reference(double forward = 20.0, double strike = 20.0);
};

/// Raw OU integrals (X1, X2) at one date.
struct FactorState {
    double x1 = 0.0;
    double x2 = 0.0;
};

/// Variance of sigma1 X1_t + sigma2 X2_t.
double variance_lambda(const TwoFactorParams& p, double t);

/// Covariance of the structure state (sigma1 X1_t, sigma2 X2_t), row-major 2x2.
std::array<double, 4> structure_covariance(const TwoFactorParams& p, double t);

/// Covariance of the exact one-step OU innovations (eps1, eps2) over dt,
/// row-major 2x2, for the unscaled integrals.
std::array<double, 4> innovation_covariance(const TwoFactorParams& p, double dt);

/// Lower Cholesky factor (l11, l21, l22) of a 2x2 covariance; tolerant of
/// singular matrices.
std::array<double, 3> cholesky2(const std::array<double, 4>& cov);

/// Exact simulation of the OU pair on the grid t_0..t_n. Paths are grouped in
/// fixed blocks with counter-derived seeds, so results do not depend on the
/// thread count.
class FactorSimulator {
public:
    static constexpr std::size_t kBlockPaths = 4096;

    FactorSimulator(const TwoFactorParams& p, std::uint64_t seed);

    [[nodiscard]] std::size_t block_count(std::size_t n_paths) const {
        return (n_paths + kBlockPaths - 1) / kBlockPaths;
    }
    /// Calls visit(path_index, states) for every path of block b, where states
    /// holds n+1 entries X(t_0) .. X(t_n).
    void simulate_block(std::size_t b, std::size_t n_paths,
                        const std::function<void(std::size_t, std::span<const FactorState>)>& visit) const;

private:
    TwoFactorParams params_;
    std::uint64_t seed_;
    double decay1_, decay2_;
    std::array<double, 3> chol_;
};

/// n_paths x (n+1) states, row-major by path.
std::vector<FactorState> simulate_factor_paths(const TwoFactorParams& p, std::size_t n_paths,
                                               std::uint64_t seed, unsigned threads = 1);

struct SpotPayoff {
    double spot = 0.0;
    double payoff = 0.0;  // discounted to time 0
};

/// Spot at t_k and payoff v_k = exp(-r t_k)(S - K_k) for a raw factor state.
SpotPayoff spot_and_payoff(const TwoFactorParams& p, int k, FactorState y);

/// Structure state used for quantization: (sigma1 x1, sigma2 x2).
std::array<double, 2> structure_state(const TwoFactorParams& p, FactorState y);

/// Same as spot_and_payoff, from a structure state z = (sigma1 x1, sigma2 x2).
SpotPayoff structure_payoff(const TwoFactorParams& p, int k, std::span<const double> z);

/// Black price of a call on a forward with total log-variance `lambda`.
double black_call(double forward, double strike, double lambda);

/// Sum over dates of discounted Black calls: the value of buying every
/// positive payoff.
double closed_form_strip(const TwoFactorParams& p);

/// Exact swap value sum_k exp(-r t_k) (F_{0,t_k} - K_k).
double swap_value(const TwoFactorParams& p);

}  // namespace swing
