#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "swing/contracts.hpp"
#include "swing/model.hpp"
#include "swing/oracle.hpp"
#include "swing/quantizer.hpp"

namespace swing {

/// Dense row-major matrix.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    [[nodiscard]] std::size_t rows() const { return rows_; }
    [[nodiscard]] std::size_t cols() const { return cols_; }
    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    [[nodiscard]] double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
    [[nodiscard]] std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
    [[nodiscard]] std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }

    static Matrix identity(std::size_t n);
    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> data_;
};

/// Quantized structure process: one codebook per exercise date, quantized
/// transition matrices between consecutive dates and the payoff at each grid
/// point.
struct QuantTree {
    std::vector<Codebook> grids;                 // n entries, grids[0] carries weights
    std::vector<Matrix> transitions;             // n-1 entries, N_k x N_{k+1}
    std::vector<std::vector<double>> payoffs;    // n entries, N_k values

    [[nodiscard]] int horizon() const { return static_cast<int>(grids.size()); }
    void validate() const;
};

enum class GridOptimizer { lloyd, clvq, clvq_lloyd };

GridOptimizer parse_optimizer(const std::string& name);
std::string optimizer_name(GridOptimizer o);

struct GridOptions {
    std::size_t size = 50;          // grid size per date
    std::size_t n_samples = 100000; // marginal samples per date
    std::uint64_t seed = 1;
    GridOptimizer optimizer = GridOptimizer::clvq_lloyd;
    std::size_t max_iter = 500;
    double tol = 1e-6;
    unsigned threads = 1;
};

struct GridBuild {
    std::vector<Codebook> grids;
    std::vector<OptimizerReport> reports;  // reports[0] is empty (single root point)
};

/// Optimized quadratic codebooks of the marginal laws of the structure state
/// (sigma1 X1, sigma2 X2) at each date; date 0 is the single point (0,0).
GridBuild build_grids(const TwoFactorParams& p, const GridOptions& opts);

struct TransitionOptions {
    std::size_t n_samples = 100000;
    std::uint64_t seed = 2;
    unsigned threads = 1;
};

/// Per-path additive functional sum_k f(k, cell_k) evaluated during transition
/// estimation, for diagnostics such as the standard error of a quantized strip.
using CellFunctional = std::function<double(int k, std::size_t cell)>;

struct TransitionEstimate {
    std::vector<Matrix> matrices;
    std::vector<std::vector<double>> weights;  // empirical cell frequencies per date
    std::size_t zero_visit_rows = 0;
    double functional_mean = 0.0;
    double functional_std_err = 0.0;
};

/// Counts consecutive nearest-cell pairs along exactly simulated paths.
/// Rows never visited are set to the cell frequencies of the next date.
TransitionEstimate estimate_transitions(const TwoFactorParams& p, const std::vector<Codebook>& grids,
                                        const TransitionOptions& opts, const CellFunctional& functional = {});

/// Attaches the estimated weights to the grids and evaluates payoffs. With
/// `match_forward` the spot at each grid point is rescaled so that the
/// quantized forward sum_i w_i S(y_i) equals F_{0,t_k}.
QuantTree assemble_tree(const TwoFactorParams& p, std::vector<Codebook> grids, const TransitionEstimate& est,
                        bool match_forward = true);

/// Values p(k, Q, y_i) of the bang-bang DP plus the chosen actions.
class DPTable {
public:
    DPTable() = default;
    DPTable(int n, std::vector<std::vector<IntConstraints>> states);

    [[nodiscard]] int horizon() const { return n_; }
    [[nodiscard]] const std::vector<IntConstraints>& states(int k) const { return states_[static_cast<std::size_t>(k)]; }
    [[nodiscard]] bool contains(int k, IntConstraints q) const;
    [[nodiscard]] std::size_t state_index(int k, IntConstraints q) const;
    [[nodiscard]] const std::vector<double>& values(int k, IntConstraints q) const;
    [[nodiscard]] const std::vector<std::uint8_t>& actions(int k, IntConstraints q) const;

    std::vector<double>& values_at(int k, std::size_t s) { return values_[static_cast<std::size_t>(k)][s]; }
    std::vector<std::uint8_t>& actions_at(int k, std::size_t s) { return actions_[static_cast<std::size_t>(k)][s]; }

private:
    int n_ = 0;
    std::vector<std::vector<IntConstraints>> states_;
    std::vector<std::map<IntConstraints, std::size_t>> index_;
    std::vector<std::vector<std::vector<double>>> values_;
    std::vector<std::vector<std::vector<std::uint8_t>>> actions_;
};

struct DPResult {
    double price = 0.0;
    DPTable table;
};

/// Bang-bang quantized DP over the residual constraints reachable from an
/// integer q0. Non-integer constraints go through premium_surface instead.
DPResult quantized_dp_price(const QuantTree& tree, IntConstraints q0, unsigned threads = 1);

/// Premium at every integer vertex of T+(n) from a single backward pass over
/// all integer residual constraints.
PremiumSurface premium_surface(const QuantTree& tree, unsigned threads = 1);

/// Same pass, also returning the full table (usable as a policy for any q0).
DPResult full_dp_table(const QuantTree& tree, unsigned threads = 1);

/// Price for arbitrary constraints: the surface value, interpolated affinely
/// on the tiling for non-integer constraints.
double price_from_surface(const PremiumSurface& surface, GlobalConstraints q);

/// Min-argmax {0,1} decisions per (date, residual constraints, grid cell).
class Policy {
public:
    explicit Policy(const DPTable& table) : table_(&table) {}
    [[nodiscard]] int action(int k, IntConstraints q, std::size_t cell) const;

private:
    const DPTable* table_;
};

struct PolicyValuation {
    double mc_value = 0.0;
    double std_err = 0.0;
    std::vector<int> totals;  // purchased volume per simulated path
    bool bang_bang = true;    // every action taken was 0 or 1
};

/// Runs the DP policy on fresh exactly simulated paths: decisions use the
/// nearest grid cell, payoffs the exact state.
PolicyValuation extract_and_value_policy(const QuantTree& tree, const DPTable& table, IntConstraints q0,
                                         const TwoFactorParams& p, std::size_t n_paths, std::uint64_t seed,
                                         unsigned threads = 1);

/// The quantized chain as a (recombining) scenario lattice; needs a single
/// root point.
ScenarioLattice to_lattice(const QuantTree& tree);

}  // namespace swing
