#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

namespace swing {

/// Absolute slack used on tile membership inequalities and interval checks.
inline constexpr double kConstraintTol = 1e-12;

/// Swing contract as quoted: local purchase bounds per date and global bounds
/// on the cumulated volume.
struct RawContract {
    int n = 1;
    double q_min = 0.0;
    double q_max = 1.0;
    double Q_min = 0.0;
    double Q_max = 1.0;
    double rate = 0.0;
    std::vector<double> strikes;
};

/// Residual global constraints (q_lo, q_hi) in normalized volume units.
struct GlobalConstraints {
    double lo = 0.0;
    double hi = 0.0;

    friend bool operator==(const GlobalConstraints&, const GlobalConstraints&) = default;
};

/// Integer-valued global constraints, the states visited by the bang-bang DP.
struct IntConstraints {
    int lo = 0;
    int hi = 0;

    [[nodiscard]] GlobalConstraints as_real() const {
        return {static_cast<double>(lo), static_cast<double>(hi)};
    }
    friend bool operator==(const IntConstraints&, const IntConstraints&) = default;
    friend auto operator<=>(const IntConstraints&, const IntConstraints&) = default;
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

/// Result of splitting a raw contract into a swap on q_min per date plus a
/// normalized swing with [0,1] local bounds.
struct NormalizedContract {
    double swap_weight = 0.0;
    double swing_weight = 0.0;
    GlobalConstraints constraints;
    bool pure_swap = false;
};

NormalizedContract normalize_contract(const RawContract& c);

/// Residual constraints after purchasing x with `remaining` future dates left:
/// ((lo - x)^+, min(hi - x, remaining)).
GlobalConstraints chi(GlobalConstraints q, double x, int remaining);
IntConstraints chi(IntConstraints q, int x, int remaining);

/// Admissible purchases at the current date: [min((lo - M)^+, 1), min(hi, 1)]
/// where M is the number of remaining future dates.
Interval admissible_interval(GlobalConstraints q, int remaining);

/// Bang-bang actions available at an integer state: the endpoints of the
/// admissible interval, in ascending order (one entry when forced).
std::vector<int> bang_bang_actions(IntConstraints q, int remaining);

enum class Orientation { upper, lower };

/// One unit triangle of the tiling of T+(n) = {0 <= u <= v <= n}.
///   upper T+_{ij}: v >= u + j - i, vertices (i,j) (i,j+1) (i+1,j+1)
///   lower T-_{ij}: v <= u + j - i, vertices (i,j) (i+1,j) (i+1,j+1), i < j
struct Tile {
    int i = 0;
    int j = 0;
    Orientation orientation = Orientation::upper;

    [[nodiscard]] std::array<IntConstraints, 3> vertices() const;
    [[nodiscard]] bool contains(GlobalConstraints q, double tol = kConstraintTol) const;
    /// Barycentric weights of q with respect to vertices(), in that order.
    [[nodiscard]] std::array<double, 3> barycentric(GlobalConstraints q) const;

    friend bool operator==(const Tile&, const Tile&) = default;
};

/// True when 0 <= lo <= hi <= n (with kConstraintTol slack).
bool in_triangle(GlobalConstraints q, int n);

/// Tile containing q. q.hi is clamped to n first. Shared edges resolve to the
/// upper tile; integer points resolve to the smallest (i,j), upper first.
Tile locate_tile(GlobalConstraints q, int n);

/// Residual integer constraints attainable at date k from q0 under admissible
/// {0,1} purchases, ordered by cumulated purchase count, duplicates removed.
std::vector<IntConstraints> reachable_set(IntConstraints q0, int k, int n);

/// Closed-form cardinality of reachable_set(q0, k, n).
std::size_t reachable_count(IntConstraints q0, int k, int n);

/// Number of integer vertices of T+(n).
inline constexpr std::size_t triangle_vertex_count(int n) {
    return static_cast<std::size_t>(n + 1) * static_cast<std::size_t>(n + 2) / 2;
}

/// Premium values on the integer vertices of T+(n) with piecewise-affine
/// interpolation over the tiling.
class PremiumSurface {
public:
    PremiumSurface() = default;
    explicit PremiumSurface(int n);

    [[nodiscard]] int horizon() const { return n_; }
    void set(int lo, int hi, double value);
    [[nodiscard]] bool has(int lo, int hi) const;
    /// Throws SurfaceIncomplete when the vertex was never set.
    [[nodiscard]] double at(int lo, int hi) const;
    [[nodiscard]] std::optional<double> find(int lo, int hi) const;

    /// All integer vertices in (lo, hi) lexicographic order.
    [[nodiscard]] std::vector<IntConstraints> vertices() const;

private:
    [[nodiscard]] std::size_t index(int lo, int hi) const;

    int n_ = 0;
    std::vector<double> values_;
    std::vector<char> present_;
};

/// Affine interpolation of the surface on the tile containing q.
double interpolate_on_tile(const PremiumSurface& surface, GlobalConstraints q);

}  // namespace swing
