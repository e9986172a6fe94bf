#include "swing/tree_pricer.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <random>
#include <thread>

#include "swing/errors.hpp"
#include "swing/parallel.hpp"
#include "swing/rng.hpp"

namespace swing {

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

void QuantTree::validate() const {
    const std::size_t n = grids.size();
    SWING_REQUIRE(n >= 1, "tree needs at least one date");
    SWING_REQUIRE(transitions.size() + 1 == n, "tree needs n-1 transition matrices");
    SWING_REQUIRE(payoffs.size() == n, "tree needs payoffs for every date");
    for (std::size_t k = 0; k < n; ++k) {
        SWING_REQUIRE(payoffs[k].size() == grids[k].size(), "payoff vector does not match grid size");
        for (double v : payoffs[k]) SWING_REQUIRE(std::isfinite(v), "payoffs must be finite");
    }
    SWING_REQUIRE(grids[0].size() == 1 || grids[0].has_weights(), "multi-point root grid needs weights");
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const Matrix& m = transitions[k];
        SWING_REQUIRE(m.rows() == grids[k].size() && m.cols() == grids[k + 1].size(),
                      "transition matrix shape does not chain with the grids");
        for (std::size_t i = 0; i < m.rows(); ++i) {
            double s = 0.0;
            for (double v : m.row(i)) {
                SWING_REQUIRE(v >= 0.0, "negative transition probability");
                s += v;
            }
            SWING_REQUIRE(std::abs(s - 1.0) <= 1e-9, "transition rows must sum to 1");
        }
    }
}

GridOptimizer parse_optimizer(const std::string& name) {
    if (name == "lloyd") return GridOptimizer::lloyd;
    if (name == "clvq") return GridOptimizer::clvq;
    if (name == "clvq+lloyd" || name == "clvq_lloyd") return GridOptimizer::clvq_lloyd;
    throw ContractViolation("unknown grid optimizer '" + name + "'");
}

std::string optimizer_name(GridOptimizer o) {
    switch (o) {
        case GridOptimizer::lloyd: return "lloyd";
        case GridOptimizer::clvq: return "clvq";
        case GridOptimizer::clvq_lloyd: return "clvq+lloyd";
    }
    return "?";
}

namespace {

Codebook root_grid() { return Codebook(PointSet(2, std::vector<double>{0.0, 0.0}), {1.0}); }

OptimizerReport trivial_report() {
    OptimizerReport r;
    r.converged = true;
    return r;
}

/// Antithetic samples of N(0, L L^T).
PointSet marginal_samples(const std::array<double, 3>& chol, std::size_t count, std::uint64_t seed) {
    Engine eng(seed);
    std::normal_distribution<double> gauss;
    const std::size_t pairs = std::max<std::size_t>(1, count / 2);
    std::vector<double> coords;
    coords.reserve(4 * pairs);
    for (std::size_t s = 0; s < pairs; ++s) {
        const double z1 = gauss(eng), z2 = gauss(eng);
        const double a = chol[0] * z1;
        const double b = chol[1] * z1 + chol[2] * z2;
        coords.insert(coords.end(), {a, b, -a, -b});
    }
    return PointSet(2, std::move(coords));
}

/// First `size` pairwise distinct samples, fewer when the law is degenerate.
PointSet distinct_prefix(const PointSet& samples, std::size_t size) {
    PointSet out(samples.dim(), 0);
    for (std::size_t s = 0; s < samples.size() && out.size() < size; ++s) {
        const auto y = samples[s];
        bool fresh = true;
        for (std::size_t i = 0; i < out.size() && fresh; ++i)
            fresh = !std::equal(y.begin(), y.end(), out[i].begin());
        if (fresh) out.push_back(y);
    }
    return out;
}

}  // namespace

GridBuild build_grids(const TwoFactorParams& p, const GridOptions& opts) {
    p.validate();
    SWING_REQUIRE(opts.size >= 1, "grid size must be positive");
    SWING_REQUIRE(opts.n_samples >= 10 * opts.size, "grid optimization needs at least 10 samples per point");
    GridBuild out;
    out.grids.push_back(root_grid());
    out.reports.push_back(trivial_report());

    std::array<double, 3> prev_chol{0.0, 0.0, 0.0};
    for (int k = 1; k < p.n; ++k) {
        const auto chol = cholesky2(structure_covariance(p, p.date(k)));
        if (chol[0] == 0.0 && chol[2] == 0.0) {
            // Degenerate marginal: the state is a.s. at the origin.
            out.grids.push_back(root_grid());
            out.reports.push_back(trivial_report());
            prev_chol = chol;
            continue;
        }
        const PointSet samples = marginal_samples(chol, opts.n_samples, stream_seed(opts.seed, static_cast<std::uint64_t>(k)));

        PointSet init(2, 0);
        const Codebook& prev = out.grids.back();
        const bool warm = prev.size() == std::min(opts.size, samples.size()) && prev_chol[0] > 0.0 && prev_chol[2] > 0.0;
        if (warm) {
            // Carry the previous grid over through L_k L_{k-1}^{-1}.
            for (std::size_t i = 0; i < prev.size(); ++i) {
                const auto q = prev.point(i);
                const double u1 = q[0] / prev_chol[0];
                const double u2 = (q[1] - prev_chol[1] * u1) / prev_chol[2];
                const double pt[2] = {chol[0] * u1, chol[1] * u1 + chol[2] * u2};
                init.push_back(pt);
            }
        } else {
            init = distinct_prefix(samples, opts.size);
        }

        LloydResult res{Codebook(init), {}};
        if (opts.optimizer != GridOptimizer::lloyd && !warm) {
            std::size_t cursor = 0;
            ClvqOptions co;
            co.steps = samples.size();
            co.holdout = 0;
            res = clvq_optimize(
                [&](std::span<double> y) {
                    const auto s = samples[cursor];
                    std::copy(s.begin(), s.end(), y.begin());
                    cursor = (cursor + 1) % samples.size();
                },
                res.codebook, co);
        }
        if (opts.optimizer != GridOptimizer::clvq) {
            LloydOptions lo;
            lo.max_iter = opts.max_iter;
            lo.tol = opts.tol;
            lo.threads = opts.threads;
            res = lloyd_optimize(samples, res.codebook, lo);
        } else {
            LloydOptions lo;
            lo.max_iter = 1;  // weights and distortion of the CLVQ grid
            lo.threads = opts.threads;
            auto w = lloyd_optimize(samples, res.codebook, lo);
            res.codebook = Codebook(res.codebook.points(), w.codebook.weights());
            res.report.final_distortion = w.report.final_distortion;
        }
        out.grids.push_back(std::move(res.codebook));
        out.reports.push_back(std::move(res.report));
        prev_chol = chol;
    }
    return out;
}

TransitionEstimate estimate_transitions(const TwoFactorParams& p, const std::vector<Codebook>& grids,
                                        const TransitionOptions& opts, const CellFunctional& functional) {
    p.validate();
    const int n = p.n;
    SWING_REQUIRE(grids.size() == static_cast<std::size_t>(n), "one grid per date expected");
    SWING_REQUIRE(opts.n_samples >= 1, "need at least one path");
    std::vector<NearestSearcher> search;
    search.reserve(grids.size());
    for (const auto& g : grids) search.emplace_back(g);

    const FactorSimulator sim(p, opts.seed);
    const std::size_t blocks = sim.block_count(opts.n_samples);
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, opts.threads), blocks));

    // Integer counts: merge order cannot change the result.
    using Counts = std::vector<std::vector<std::uint64_t>>;
    auto fresh_counts = [&] {
        Counts c(static_cast<std::size_t>(n));
        for (int k = 0; k + 1 < n; ++k)
            c[static_cast<std::size_t>(k)].assign(grids[static_cast<std::size_t>(k)].size() * grids[static_cast<std::size_t>(k) + 1].size(), 0);
        return c;
    };
    std::vector<Counts> worker_pairs(workers);
    std::vector<std::vector<std::uint64_t>> last_visits(workers, std::vector<std::uint64_t>(grids.back().size(), 0));
    std::vector<double> block_sum(blocks, 0.0), block_sq(blocks, 0.0);
    std::atomic<unsigned> next_worker{0};
    std::mutex slot_mutex;
    std::map<std::thread::id, unsigned> slot_of;

    parallel_blocks(blocks, workers, [&](std::size_t b) {
        unsigned slot;
        {
            std::lock_guard lock(slot_mutex);
            auto [it, inserted] = slot_of.try_emplace(std::this_thread::get_id(), 0u);
            if (inserted) {
                it->second = next_worker++;
                worker_pairs[it->second] = fresh_counts();
            }
            slot = it->second;
        }
        Counts& pairs = worker_pairs[slot];
        std::vector<std::size_t> cells(static_cast<std::size_t>(n));
        sim.simulate_block(b, opts.n_samples, [&](std::size_t, std::span<const FactorState> states) {
            double f = 0.0;
            for (int k = 0; k < n; ++k) {
                const auto z = structure_state(p, states[static_cast<std::size_t>(k)]);
                const std::size_t c = search[static_cast<std::size_t>(k)](z);
                cells[static_cast<std::size_t>(k)] = c;
                if (functional) f += functional(k, c);
            }
            for (int k = 0; k + 1 < n; ++k) {
                const std::size_t cols = grids[static_cast<std::size_t>(k) + 1].size();
                ++pairs[static_cast<std::size_t>(k)][cells[static_cast<std::size_t>(k)] * cols + cells[static_cast<std::size_t>(k) + 1]];
            }
            ++last_visits[slot][cells.back()];
            block_sum[b] += f;
            block_sq[b] += f * f;
        });
    });

    TransitionEstimate est;
    const double total = static_cast<double>(opts.n_samples);
    Counts pairs = fresh_counts();
    for (const auto& wp : worker_pairs) {
        if (wp.empty()) continue;
        for (int k = 0; k + 1 < n; ++k)
            for (std::size_t j = 0; j < pairs[static_cast<std::size_t>(k)].size(); ++j)
                pairs[static_cast<std::size_t>(k)][j] += wp[static_cast<std::size_t>(k)][j];
    }
    std::vector<std::uint64_t> last(grids.back().size(), 0);
    for (const auto& lv : last_visits)
        for (std::size_t i = 0; i < lv.size(); ++i) last[i] += lv[i];

    // Cell frequencies: row sums of each pair count, plus the last date.
    est.weights.resize(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        const std::size_t nk = grids[static_cast<std::size_t>(k)].size();
        std::vector<double> w(nk, 0.0);
        if (k + 1 < n) {
            const std::size_t cols = grids[static_cast<std::size_t>(k) + 1].size();
            for (std::size_t i = 0; i < nk; ++i) {
                std::uint64_t s = 0;
                for (std::size_t j = 0; j < cols; ++j) s += pairs[static_cast<std::size_t>(k)][i * cols + j];
                w[i] = static_cast<double>(s) / total;
            }
        } else {
            for (std::size_t i = 0; i < nk; ++i) w[i] = static_cast<double>(last[i]) / total;
        }
        est.weights[static_cast<std::size_t>(k)] = std::move(w);
    }
    for (int k = 0; k + 1 < n; ++k) {
        const std::size_t rows = grids[static_cast<std::size_t>(k)].size();
        const std::size_t cols = grids[static_cast<std::size_t>(k) + 1].size();
        Matrix m(rows, cols);
        for (std::size_t i = 0; i < rows; ++i) {
            std::uint64_t s = 0;
            for (std::size_t j = 0; j < cols; ++j) s += pairs[static_cast<std::size_t>(k)][i * cols + j];
            if (s == 0) {
                ++est.zero_visit_rows;
                const auto& next = est.weights[static_cast<std::size_t>(k) + 1];
                for (std::size_t j = 0; j < cols; ++j) m(i, j) = next[j];
                continue;
            }
            for (std::size_t j = 0; j < cols; ++j)
                m(i, j) = static_cast<double>(pairs[static_cast<std::size_t>(k)][i * cols + j]) / static_cast<double>(s);
        }
        est.matrices.push_back(std::move(m));
    }

    double sum = 0.0, sq = 0.0;
    for (std::size_t b = 0; b < blocks; ++b) {
        sum += block_sum[b];
        sq += block_sq[b];
    }
    est.functional_mean = sum / total;
    const double var = total > 1.0 ? std::max(0.0, (sq - total * est.functional_mean * est.functional_mean) / (total - 1.0)) : 0.0;
    est.functional_std_err = std::sqrt(var / total);
    return est;
}

QuantTree assemble_tree(const TwoFactorParams& p, std::vector<Codebook> grids, const TransitionEstimate& est,
                        bool match_forward) {
    QuantTree tree;
    for (std::size_t k = 0; k < grids.size(); ++k) {
        grids[k].set_weights(est.weights[k]);
        const int kk = static_cast<int>(k);
        const double t = p.date(kk);
        std::vector<double> spot(grids[k].size());
        double mean = 0.0;
        for (std::size_t i = 0; i < spot.size(); ++i) {
            spot[i] = structure_payoff(p, kk, grids[k].point(i)).spot;
            mean += est.weights[k][i] * spot[i];
        }
        const double scale = match_forward && mean > 0.0 ? p.forward[k] / mean : 1.0;
        std::vector<double> v(spot.size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::exp(-p.r * t) * (scale * spot[i] - p.strikes[k]);
        tree.payoffs.push_back(std::move(v));
    }
    tree.grids = std::move(grids);
    tree.transitions = est.matrices;
    tree.validate();
    return tree;
}

DPTable::DPTable(int n, std::vector<std::vector<IntConstraints>> states)
    : n_(n), states_(std::move(states)), index_(states_.size()), values_(states_.size()), actions_(states_.size()) {
    for (std::size_t k = 0; k < states_.size(); ++k) {
        for (std::size_t s = 0; s < states_[k].size(); ++s) index_[k].emplace(states_[k][s], s);
        values_[k].resize(states_[k].size());
        actions_[k].resize(states_[k].size());
    }
}

bool DPTable::contains(int k, IntConstraints q) const {
    const auto& idx = index_[static_cast<std::size_t>(k)];
    return idx.find(q) != idx.end();
}

std::size_t DPTable::state_index(int k, IntConstraints q) const {
    const auto& idx = index_[static_cast<std::size_t>(k)];
    const auto it = idx.find(q);
    if (it == idx.end())
        throw ContractViolation("residual constraints (" + std::to_string(q.lo) + ", " + std::to_string(q.hi) +
                                ") not tabulated at date " + std::to_string(k));
    return it->second;
}

const std::vector<double>& DPTable::values(int k, IntConstraints q) const {
    return values_[static_cast<std::size_t>(k)][state_index(k, q)];
}

const std::vector<std::uint8_t>& DPTable::actions(int k, IntConstraints q) const {
    return actions_[static_cast<std::size_t>(k)][state_index(k, q)];
}

namespace {

void run_backward(const QuantTree& tree, DPTable& table, unsigned threads) {
    const int n = tree.horizon();
    for (std::size_t s = 0; s < table.states(n).size(); ++s) table.values_at(n, s).assign(1, 0.0);

    for (int k = n - 1; k >= 0; --k) {
        const auto kk = static_cast<std::size_t>(k);
        const std::size_t nk = tree.grids[kk].size();
        const int remaining = n - k - 1;
        const auto& states = table.states(k);

        // Continuation values P_k * V_{k+1}(Q') for every tabulated Q'.
        std::vector<std::vector<double>> cont;
        if (k + 1 < n) {
            const auto& next_states = table.states(k + 1);
            const Matrix& P = tree.transitions[kk];
            cont.resize(next_states.size());
            parallel_blocks(next_states.size(), threads, [&](std::size_t s) {
                const auto& v = table.values(k + 1, next_states[s]);
                std::vector<double> c(nk, 0.0);
                for (std::size_t i = 0; i < nk; ++i) {
                    const auto row = P.row(i);
                    double acc = 0.0;
                    for (std::size_t j = 0; j < row.size(); ++j) acc += row[j] * v[j];
                    c[i] = acc;
                }
                cont[s] = std::move(c);
            });
        }

        parallel_blocks(states.size(), threads, [&](std::size_t s) {
            const IntConstraints q = states[s];
            const auto actions = bang_bang_actions(q, remaining);
            std::vector<double> best(nk, -std::numeric_limits<double>::infinity());
            std::vector<std::uint8_t> choice(nk, 0);
            for (int x : actions) {
                if (x != 0 && x != 1) throw NumericalFailure("non bang-bang action at an integer state");
                const double* c = nullptr;
                if (k + 1 < n) c = cont[table.state_index(k + 1, chi(q, x, remaining))].data();
                for (std::size_t i = 0; i < nk; ++i) {
                    const double v = x * tree.payoffs[kk][i] + (c ? c[i] : 0.0);
                    if (v > best[i]) {
                        best[i] = v;
                        choice[i] = static_cast<std::uint8_t>(x);
                    }
                }
            }
            table.values_at(k, s) = std::move(best);
            table.actions_at(k, s) = std::move(choice);
        });
    }
}

double root_value(const QuantTree& tree, const std::vector<double>& v) {
    const Codebook& root = tree.grids.front();
    if (!root.has_weights()) return v.front();
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) s += root.weights()[i] * v[i];
    return s;
}

}  // namespace

DPResult quantized_dp_price(const QuantTree& tree, IntConstraints q0, unsigned threads) {
    tree.validate();
    const int n = tree.horizon();
    SWING_REQUIRE(q0.lo >= 0 && q0.lo <= q0.hi && q0.hi <= n, "initial constraints must lie in T+(n)");
    std::vector<std::vector<IntConstraints>> states;
    for (int k = 0; k <= n; ++k) states.push_back(reachable_set(q0, k, n));
    DPResult out{0.0, DPTable(n, std::move(states))};
    run_backward(tree, out.table, threads);
    out.price = root_value(tree, out.table.values(0, q0));
    return out;
}

DPResult full_dp_table(const QuantTree& tree, unsigned threads) {
    tree.validate();
    const int n = tree.horizon();
    std::vector<std::vector<IntConstraints>> states;
    for (int k = 0; k <= n; ++k) states.push_back(PremiumSurface(n - k).vertices());
    DPResult out{0.0, DPTable(n, std::move(states))};
    run_backward(tree, out.table, threads);
    out.price = root_value(tree, out.table.values(0, {0, n}));
    return out;
}

PremiumSurface premium_surface(const QuantTree& tree, unsigned threads) {
    const DPResult full = full_dp_table(tree, threads);
    const int n = tree.horizon();
    PremiumSurface surface(n);
    for (const auto& q : full.table.states(0)) surface.set(q.lo, q.hi, root_value(tree, full.table.values(0, q)));
    return surface;
}

double price_from_surface(const PremiumSurface& surface, GlobalConstraints q) {
    return interpolate_on_tile(surface, q);
}

int Policy::action(int k, IntConstraints q, std::size_t cell) const {
    return table_->actions(k, q).at(cell);
}

PolicyValuation extract_and_value_policy(const QuantTree& tree, const DPTable& table, IntConstraints q0,
                                         const TwoFactorParams& p, std::size_t n_paths, std::uint64_t seed,
                                         unsigned threads) {
    tree.validate();
    const int n = tree.horizon();
    SWING_REQUIRE(n == p.n, "tree and model horizons differ");
    SWING_REQUIRE(n_paths >= 1, "need at least one path");
    SWING_REQUIRE(table.contains(0, q0), "DP table does not cover the initial constraints");
    const Policy policy(table);
    std::vector<NearestSearcher> search;
    for (const auto& g : tree.grids) search.emplace_back(g);

    const FactorSimulator sim(p, seed);
    const std::size_t blocks = sim.block_count(n_paths);
    std::vector<double> block_sum(blocks, 0.0), block_sq(blocks, 0.0);
    std::vector<char> block_binary(blocks, 1);
    PolicyValuation out;
    out.totals.assign(n_paths, 0);

    parallel_blocks(blocks, threads, [&](std::size_t b) {
        sim.simulate_block(b, n_paths, [&](std::size_t path, std::span<const FactorState> states) {
            IntConstraints q = q0;
            int bought = 0;
            double value = 0.0;
            for (int k = 0; k < n; ++k) {
                const auto z = structure_state(p, states[static_cast<std::size_t>(k)]);
                const std::size_t cell = search[static_cast<std::size_t>(k)](z);
                const int x = policy.action(k, q, cell);
                if (x != 0 && x != 1) block_binary[b] = 0;
                value += x * structure_payoff(p, k, z).payoff;
                bought += x;
                q = chi(q, x, n - k - 1);
            }
            if (bought < q0.lo || bought > q0.hi)
                throw NumericalFailure("policy produced an infeasible purchase schedule");
            out.totals[path] = bought;
            block_sum[b] += value;
            block_sq[b] += value * value;
        });
    });

    double sum = 0.0, sq = 0.0;
    for (std::size_t b = 0; b < blocks; ++b) {
        sum += block_sum[b];
        sq += block_sq[b];
        out.bang_bang = out.bang_bang && block_binary[b];
    }
    const double m = static_cast<double>(n_paths);
    out.mc_value = sum / m;
    const double var = m > 1.0 ? std::max(0.0, (sq - m * out.mc_value * out.mc_value) / (m - 1.0)) : 0.0;
    out.std_err = std::sqrt(var / m);
    return out;
}

ScenarioLattice to_lattice(const QuantTree& tree) {
    tree.validate();
    SWING_REQUIRE(tree.grids.front().size() == 1, "lattice conversion needs a single root point");
    ScenarioLattice lat;
    const std::size_t n = tree.grids.size();
    for (std::size_t k = 0; k < n; ++k) {
        std::vector<LatticeNode> nodes(tree.grids[k].size());
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            nodes[i].payoff = tree.payoffs[k][i];
            if (k + 1 < n)
                for (std::size_t j = 0; j < tree.transitions[k].cols(); ++j)
                    nodes[i].children.push_back({j, tree.transitions[k](i, j)});
        }
        lat.levels.push_back(std::move(nodes));
    }
    return lat;
}

}  // namespace swing
