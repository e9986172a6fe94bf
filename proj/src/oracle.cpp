#include "swing/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <nlohmann/json.hpp>

#include "swing/errors.hpp"

namespace swing {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double pos(double x) { return x > 0.0 ? x : 0.0; }

using ValueLayer = std::map<IntConstraints, std::vector<double>>;

/// Backward DP over lattice nodes; `states[k]` lists the residual constraints
/// evaluated at date k. Returns the date-0 layer.
ValueLayer lattice_backward(const ScenarioLattice& lat,
                            const std::vector<std::vector<IntConstraints>>& states) {
    const int n = lat.depth();
    ValueLayer next;
    for (const auto& q : states[static_cast<std::size_t>(n)])
        next[q] = std::vector<double>(1, 0.0);  // terminal layer, node-independent

    for (int k = n - 1; k >= 0; --k) {
        const auto& nodes = lat.levels[static_cast<std::size_t>(k)];
        const int remaining = n - k - 1;
        ValueLayer layer;
        for (const auto& q : states[static_cast<std::size_t>(k)]) {
            const auto actions = bang_bang_actions(q, remaining);
            std::vector<double> values(nodes.size(), kNegInf);
            for (int x : actions) {
                const IntConstraints nq = chi(q, x, remaining);
                const auto it = next.find(nq);
                if (it == next.end())
                    throw ContractViolation("residual constraints left the reachable set");
                const auto& cont = it->second;
                for (std::size_t i = 0; i < nodes.size(); ++i) {
                    double v = x * nodes[i].payoff;
                    if (k + 1 < n)
                        for (const auto& e : nodes[i].children) v += e.probability * cont[e.node];
                    if (v > values[i]) values[i] = v;
                }
            }
            layer.emplace(q, std::move(values));
        }
        next = std::move(layer);
    }
    return next;
}

double bruteforce_node(const ScenarioLattice& lat, int k, std::size_t node, int bought,
                       IntConstraints q) {
    const int n = lat.depth();
    if (k == n) return (bought >= q.lo && bought <= q.hi) ? 0.0 : kNegInf;
    const auto& nd = lat.levels[static_cast<std::size_t>(k)][node];
    double best = kNegInf;
    for (int x = 0; x <= 1; ++x) {
        if (bought + x > q.hi) continue;
        double v = x * nd.payoff;
        if (k + 1 < n) {
            for (const auto& e : nd.children) {
                if (e.probability == 0.0) continue;
                const double child = bruteforce_node(lat, k + 1, e.node, bought + x, q);
                if (child == kNegInf) {
                    v = kNegInf;
                    break;
                }
                v += e.probability * child;
            }
        } else if (bought + x < q.lo) {
            v = kNegInf;
        }
        best = std::max(best, v);
    }
    return best;
}

}  // namespace

void ScenarioLattice::validate() const {
    SWING_REQUIRE(!levels.empty(), "lattice needs at least one date");
    SWING_REQUIRE(levels.front().size() == 1, "lattice root level must hold exactly one node");
    for (std::size_t k = 0; k < levels.size(); ++k) {
        SWING_REQUIRE(!levels[k].empty(), "lattice level without nodes");
        for (const auto& node : levels[k]) {
            SWING_REQUIRE(std::isfinite(node.payoff), "lattice payoff must be finite");
            if (k + 1 == levels.size()) continue;
            double total = 0.0;
            for (const auto& e : node.children) {
                SWING_REQUIRE(e.node < levels[k + 1].size(), "lattice edge points past next level");
                SWING_REQUIRE(e.probability >= 0.0, "negative branch probability");
                total += e.probability;
            }
            SWING_REQUIRE(std::abs(total - 1.0) <= 1e-9, "branch probabilities must sum to 1");
        }
    }
}

std::size_t ScenarioLattice::history_node_count() const {
    // paths[i] = number of histories ending at node i of the current level
    std::vector<double> paths(levels.front().size(), 1.0);
    double total = 1.0;
    for (std::size_t k = 0; k + 1 < levels.size(); ++k) {
        std::vector<double> next(levels[k + 1].size(), 0.0);
        for (std::size_t i = 0; i < levels[k].size(); ++i)
            for (const auto& e : levels[k][i].children) next[e.node] += paths[i];
        for (double p : next) total += p;
        paths = std::move(next);
    }
    return total > 1e18 ? std::numeric_limits<std::size_t>::max() : static_cast<std::size_t>(total);
}

ScenarioLattice lattice_from_json(const std::string& text) {
    ScenarioLattice lat;
    try {
        const auto doc = nlohmann::json::parse(text);
        for (const auto& level : doc.at("levels")) {
            std::vector<LatticeNode> nodes;
            for (const auto& jn : level) {
                LatticeNode node;
                node.payoff = jn.at("payoff").get<double>();
                if (jn.contains("children"))
                    for (const auto& je : jn.at("children"))
                        node.children.push_back({je.at("node").get<std::size_t>(),
                                                 je.at("probability").get<double>()});
                nodes.push_back(std::move(node));
            }
            lat.levels.push_back(std::move(nodes));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ContractViolation(std::string("malformed lattice document: ") + e.what());
    }
    lat.validate();
    return lat;
}

std::string lattice_to_json(const ScenarioLattice& lattice) {
    nlohmann::json levels = nlohmann::json::array();
    for (const auto& level : lattice.levels) {
        nlohmann::json nodes = nlohmann::json::array();
        for (const auto& node : level) {
            nlohmann::json children = nlohmann::json::array();
            for (const auto& e : node.children)
                children.push_back({{"node", e.node}, {"probability", e.probability}});
            nodes.push_back({{"payoff", node.payoff}, {"children", std::move(children)}});
        }
        levels.push_back(std::move(nodes));
    }
    return nlohmann::json{{"levels", std::move(levels)}}.dump(2);
}

TwoPeriodResult price_two_period(const TwoPeriodInstance& inst, GlobalConstraints q) {
    SWING_REQUIRE(in_triangle(q, 2), "two-period constraints must lie in T+(2)");
    double total = 0.0, up = 0.0, down = 0.0;
    for (const auto& o : inst.v1) {
        SWING_REQUIRE(o.probability >= 0.0, "negative probability");
        total += o.probability;
        up += o.probability * pos(o.value);
        down += o.probability * pos(-o.value);
    }
    SWING_REQUIRE(std::abs(total - 1.0) <= 1e-9, "V1 probabilities must sum to 1");

    const Interval I = admissible_interval(q, 1);
    auto objective = [&](double x) {
        return x * inst.v0 + std::min(1.0, q.hi - x) * up - pos(q.lo - x) * down;
    };
    std::vector<double> candidates{I.lo, I.hi};
    for (double b : {q.lo, q.hi - 1.0})
        if (b > I.lo && b < I.hi) candidates.push_back(b);
    std::sort(candidates.begin(), candidates.end());

    TwoPeriodResult best{objective(candidates.front()), candidates.front()};
    for (double x : candidates) {
        const double v = objective(x);
        if (v > best.price) best = {v, x};
    }
    return best;
}

double price_lattice_bruteforce(const ScenarioLattice& lattice, IntConstraints q) {
    lattice.validate();
    const int n = lattice.depth();
    SWING_REQUIRE(q.lo >= 0 && q.lo <= q.hi && q.hi <= n, "constraints must lie in T+(n)");
    if (lattice.history_node_count() > kBruteforceNodeLimit)
        throw InstanceTooLarge("lattice unrolls to " + std::to_string(lattice.history_node_count()) +
                               " history nodes, enumeration limit is " +
                               std::to_string(kBruteforceNodeLimit));
    return bruteforce_node(lattice, 0, 0, 0, q);
}

double price_lattice_dp(const ScenarioLattice& lattice, IntConstraints q) {
    lattice.validate();
    const int n = lattice.depth();
    SWING_REQUIRE(q.lo >= 0 && q.lo <= q.hi && q.hi <= n, "constraints must lie in T+(n)");
    std::vector<std::vector<IntConstraints>> states;
    for (int k = 0; k <= n; ++k) states.push_back(reachable_set(q, k, n));
    return lattice_backward(lattice, states).at(q).front();
}

PremiumSurface lattice_premium_surface(const ScenarioLattice& lattice) {
    lattice.validate();
    const int n = lattice.depth();
    std::vector<std::vector<IntConstraints>> states;
    for (int k = 0; k <= n; ++k) states.push_back(PremiumSurface(n - k).vertices());
    const auto root = lattice_backward(lattice, states);
    PremiumSurface surface(n);
    for (const auto& [q, values] : root) surface.set(q.lo, q.hi, values.front());
    return surface;
}

}  // namespace swing
