#pragma once

#include <cstdint>
#include <random>

#include "swing/oracle.hpp"
#include "swing/tree_pricer.hpp"

namespace swing::testing {

/// Markov lattice with a single root, up to `width` nodes per later level and
/// up to `branching` children per node; payoffs uniform in [lo, hi].
inline ScenarioLattice random_lattice(std::mt19937_64& rng, int n, int width, int branching, double lo = -1.0,
                                      double hi = 1.0) {
    std::uniform_real_distribution<double> payoff(lo, hi), unit(0.05, 1.0);
    std::uniform_int_distribution<int> w(1, width), b(1, branching);
    ScenarioLattice lat;
    std::vector<int> widths{1};
    for (int k = 1; k < n; ++k) widths.push_back(w(rng));
    for (int k = 0; k < n; ++k) {
        std::vector<LatticeNode> nodes(static_cast<std::size_t>(widths[static_cast<std::size_t>(k)]));
        for (auto& node : nodes) {
            node.payoff = payoff(rng);
            if (k + 1 == n) continue;
            const int next = widths[static_cast<std::size_t>(k) + 1];
            const int kids = std::min(b(rng), next);
            std::vector<int> pick(static_cast<std::size_t>(next));
            for (int i = 0; i < next; ++i) pick[static_cast<std::size_t>(i)] = i;
            std::shuffle(pick.begin(), pick.end(), rng);
            pick.resize(static_cast<std::size_t>(kids));
            std::sort(pick.begin(), pick.end());
            double total = 0.0;
            for (int c : pick) {
                node.children.push_back({static_cast<std::size_t>(c), unit(rng)});
                total += node.children.back().probability;
            }
            double acc = 0.0;
            for (std::size_t c = 0; c + 1 < node.children.size(); ++c) {
                node.children[c].probability /= total;
                acc += node.children[c].probability;
            }
            node.children.back().probability = 1.0 - acc;
        }
        lat.levels.push_back(std::move(nodes));
    }
    return lat;
}

/// Quantized tree with random 1-D grids of size <= max_size (single root),
/// dense random row-stochastic transitions and payoffs uniform in [lo, hi].
inline QuantTree random_tree(std::mt19937_64& rng, int n, int max_size, double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> payoff(lo, hi), unit(0.05, 1.0);
    std::uniform_int_distribution<int> size(1, max_size);
    QuantTree tree;
    for (int k = 0; k < n; ++k) {
        const int m = k == 0 ? 1 : size(rng);
        std::vector<double> coords, w;
        for (int i = 0; i < m; ++i) {
            coords.push_back(static_cast<double>(i));
            w.push_back(1.0 / m);
        }
        tree.grids.emplace_back(PointSet(1, coords), w);
        std::vector<double> v(static_cast<std::size_t>(m));
        for (auto& x : v) x = payoff(rng);
        tree.payoffs.push_back(std::move(v));
    }
    for (int k = 0; k + 1 < n; ++k) {
        const std::size_t rows = tree.grids[static_cast<std::size_t>(k)].size();
        const std::size_t cols = tree.grids[static_cast<std::size_t>(k) + 1].size();
        Matrix m(rows, cols);
        for (std::size_t i = 0; i < rows; ++i) {
            double total = 0.0;
            for (std::size_t j = 0; j < cols; ++j) total += (m(i, j) = unit(rng));
            double acc = 0.0;
            for (std::size_t j = 0; j + 1 < cols; ++j) acc += (m(i, j) /= total);
            m(i, cols - 1) = 1.0 - acc;
        }
        tree.transitions.push_back(std::move(m));
    }
    return tree;
}

}  // namespace swing::testing
