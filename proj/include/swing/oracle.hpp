#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "swing/contracts.hpp"

namespace swing {

/// Finite-support payoff process: nodes per date, each with its payoff and
/// transition probabilities to nodes of the next date. Nodes may share
/// children (recombining); the node index is the Markov state.
struct LatticeEdge {
    std::size_t node = 0;
    double probability = 0.0;
};

struct LatticeNode {
    double payoff = 0.0;
    std::vector<LatticeEdge> children;
};

struct ScenarioLattice {
    /// levels[k] are the nodes of date k; levels[0] holds the single root.
    std::vector<std::vector<LatticeNode>> levels;

    [[nodiscard]] int depth() const { return static_cast<int>(levels.size()); }
    /// Throws ContractViolation on a malformed lattice.
    void validate() const;
    /// Nodes of the history tree obtained by unrolling shared children.
    [[nodiscard]] std::size_t history_node_count() const;
};

ScenarioLattice lattice_from_json(const std::string& text);
std::string lattice_to_json(const ScenarioLattice& lattice);

struct Outcome {
    double value = 0.0;
    double probability = 0.0;
};

/// n = 2 instance with deterministic V0 and a finite law for V1.
struct TwoPeriodInstance {
    double v0 = 0.0;
    std::vector<Outcome> v1;
};

struct TwoPeriodResult {
    double price = 0.0;
    double q0_star = 0.0;
};

/// Explicit two-date pricer: maximizes the piecewise-affine objective
///   x*V0 + min(1, Qmax - x) E(V1^+) - (Qmin - x)^+ E(V1^-)
/// over its breakpoints in [(Qmin-1)^+, min(Qmax,1)]; smallest maximizer wins.
TwoPeriodResult price_two_period(const TwoPeriodInstance& inst, GlobalConstraints q);

/// Guard for price_lattice_bruteforce, in unrolled history nodes.
inline constexpr std::size_t kBruteforceNodeLimit = 64;

/// Maximum expected cumulated payoff over every adapted {0,1} schedule whose
/// total lies in [q.lo, q.hi], by exhaustive search over the unrolled history
/// tree. Throws InstanceTooLarge beyond kBruteforceNodeLimit history nodes.
double price_lattice_bruteforce(const ScenarioLattice& lattice, IntConstraints q);

/// Backward DP over lattice nodes and residual constraints, actions restricted
/// to the bang-bang endpoints of the admissible interval.
double price_lattice_dp(const ScenarioLattice& lattice, IntConstraints q);

/// Premium at every integer vertex of T+(n) from one backward pass.
PremiumSurface lattice_premium_surface(const ScenarioLattice& lattice);

}  // namespace swing
