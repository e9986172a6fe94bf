#include "swing/contracts.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "swing/errors.hpp"

namespace swing {

namespace {

double pos(double x) { return x > 0.0 ? x : 0.0; }

std::string describe(GlobalConstraints q) {
    std::ostringstream os;
    os << "(" << q.lo << ", " << q.hi << ")";
    return os.str();
}

}  // namespace

NormalizedContract normalize_contract(const RawContract& c) {
    SWING_REQUIRE(c.n >= 1, "contract needs at least one exercise date");
    SWING_REQUIRE(c.q_min <= c.q_max, "local bounds must satisfy q_min <= q_max");
    SWING_REQUIRE(c.Q_min <= c.Q_max, "global bounds must satisfy Q_min <= Q_max");
    SWING_REQUIRE(c.Q_min >= 0.0, "global bounds must be non-negative");
    SWING_REQUIRE(c.strikes.empty() || c.strikes.size() == static_cast<std::size_t>(c.n),
                  "one strike per exercise date expected");
    const double n = c.n;
    if (n * c.q_min > c.Q_max)
        throw InfeasibleContract("n*q_min exceeds Q_max: the minimal schedule already breaks the global cap");
    if (n * c.q_max < c.Q_min)
        throw InfeasibleContract("n*q_max is below Q_min: the global floor is unreachable");

    NormalizedContract out;
    out.swap_weight = c.q_min;
    out.swing_weight = c.q_max - c.q_min;
    if (out.swing_weight == 0.0) {
        out.pure_swap = true;
        return out;
    }
    out.constraints.lo = pos((c.Q_min - n * c.q_min) / out.swing_weight);
    out.constraints.hi = std::min((c.Q_max - n * c.q_min) / out.swing_weight, n);
    return out;
}

GlobalConstraints chi(GlobalConstraints q, double x, int remaining) {
    SWING_REQUIRE(remaining >= 0, "remaining date count must be non-negative");
    const Interval I = admissible_interval(q, remaining);
    if (x < I.lo - kConstraintTol || x > I.hi + kConstraintTol)
        throw ContractViolation("purchase outside the admissible interval at " + describe(q));
    return {pos(q.lo - x), std::min(q.hi - x, static_cast<double>(remaining))};
}

IntConstraints chi(IntConstraints q, int x, int remaining) {
    const GlobalConstraints r = chi(q.as_real(), static_cast<double>(x), remaining);
    return {static_cast<int>(r.lo), static_cast<int>(r.hi)};
}

Interval admissible_interval(GlobalConstraints q, int remaining) {
    SWING_REQUIRE(remaining >= 0, "remaining date count must be non-negative");
    return {std::min(pos(q.lo - remaining), 1.0), std::min(q.hi, 1.0)};
}

std::vector<int> bang_bang_actions(IntConstraints q, int remaining) {
    const Interval I = admissible_interval(q.as_real(), remaining);
    if (I.lo > I.hi + kConstraintTol)
        throw ContractViolation("no admissible purchase: residual constraints are infeasible");
    const int lo = static_cast<int>(I.lo);
    const int hi = static_cast<int>(I.hi);
    if (lo != I.lo || hi != I.hi)
        throw ContractViolation("bang-bang actions requested at a non-integer admissible interval");
    if (lo == hi) return {lo};
    return {lo, hi};
}

std::array<IntConstraints, 3> Tile::vertices() const {
    if (orientation == Orientation::upper)
        return {IntConstraints{i, j}, IntConstraints{i, j + 1}, IntConstraints{i + 1, j + 1}};
    return {IntConstraints{i, j}, IntConstraints{i + 1, j}, IntConstraints{i + 1, j + 1}};
}

bool Tile::contains(GlobalConstraints q, double tol) const {
    if (q.lo < i - tol || q.lo > i + 1 + tol) return false;
    if (q.hi < j - tol || q.hi > j + 1 + tol) return false;
    const double diag = q.lo + (j - i);
    return orientation == Orientation::upper ? q.hi >= diag - tol : q.hi <= diag + tol;
}

std::array<double, 3> Tile::barycentric(GlobalConstraints q) const {
    const double s = q.lo - i;
    const double t = q.hi - j;
    if (orientation == Orientation::upper) return {1.0 - t, t - s, s};
    return {1.0 - s, s - t, t};
}

bool in_triangle(GlobalConstraints q, int n) {
    return q.lo >= -kConstraintTol && q.lo <= q.hi + kConstraintTol && q.hi <= n + kConstraintTol;
}

Tile locate_tile(GlobalConstraints q, int n) {
    SWING_REQUIRE(n >= 1, "tiling needs n >= 1");
    if (!(q.lo >= -kConstraintTol) || !(q.lo <= q.hi + kConstraintTol))
        throw ContractViolation("constraints " + describe(q) + " lie outside T+(n)");
    q.hi = std::min(q.hi, static_cast<double>(n));
    if (q.lo > q.hi + kConstraintTol)
        throw ContractViolation("constraints " + describe(q) + " lie outside T+(n)");

    auto candidates = [n](double x) {
        std::vector<int> c;
        const int f = static_cast<int>(std::floor(x + kConstraintTol));
        for (int v : {f - 1, f})
            if (v >= 0 && v <= n - 1) c.push_back(v);
        return c;
    };
    const auto is = candidates(q.lo);
    const auto js = candidates(q.hi);
    for (Orientation o : {Orientation::upper, Orientation::lower}) {
        for (int i : is) {
            for (int j : js) {
                if (i > j || (o == Orientation::lower && i == j)) continue;
                const Tile t{i, j, o};
                if (t.contains(q)) return t;
            }
        }
    }
    throw ContractViolation("no tile contains " + describe(q));
}

std::vector<IntConstraints> reachable_set(IntConstraints q0, int k, int n) {
    SWING_REQUIRE(n >= 0 && k >= 0 && k <= n, "reachable_set needs 0 <= k <= n");
    SWING_REQUIRE(q0.lo >= 0 && q0.lo <= q0.hi && q0.hi <= n, "initial constraints must lie in T+(n)");
    const int left = n - k;
    std::vector<IntConstraints> out;
    out.reserve(static_cast<std::size_t>(k) + 1);
    for (int l = 0; l <= k; ++l) {
        const IntConstraints q{std::max(q0.lo - l, 0), std::min(std::max(q0.hi - l, 0), left)};
        if (q.lo > q.hi) continue;  // floor no longer reachable
        if (std::find(out.begin(), out.end(), q) == out.end()) out.push_back(q);
    }
    return out;
}

std::size_t reachable_count(IntConstraints q0, int k, int n) {
    const int left = n - k;
    const int count = std::min(q0.hi, k) + 1 - std::max(q0.lo - left, 0) -
                      std::max(q0.hi - q0.lo - left, 0);
    return static_cast<std::size_t>(count);
}

PremiumSurface::PremiumSurface(int n)
    : n_(n), values_(triangle_vertex_count(n), 0.0), present_(triangle_vertex_count(n), 0) {
    SWING_REQUIRE(n >= 0, "surface horizon must be non-negative");
}

std::size_t PremiumSurface::index(int lo, int hi) const {
    if (lo < 0 || lo > hi || hi > n_)
        throw ContractViolation("vertex outside T+(n)");
    // Row `lo` holds hi = lo..n.
    const std::size_t before = static_cast<std::size_t>(lo) * (2 * static_cast<std::size_t>(n_) + 3 - lo) / 2;
    return before + static_cast<std::size_t>(hi - lo);
}

void PremiumSurface::set(int lo, int hi, double value) {
    const std::size_t idx = index(lo, hi);
    values_[idx] = value;
    present_[idx] = 1;
}

bool PremiumSurface::has(int lo, int hi) const { return present_[index(lo, hi)] != 0; }

double PremiumSurface::at(int lo, int hi) const {
    const std::size_t idx = index(lo, hi);
    if (!present_[idx])
        throw SurfaceIncomplete("no premium stored at vertex (" + std::to_string(lo) + ", " +
                                std::to_string(hi) + ")");
    return values_[idx];
}

std::optional<double> PremiumSurface::find(int lo, int hi) const {
    const std::size_t idx = index(lo, hi);
    if (!present_[idx]) return std::nullopt;
    return values_[idx];
}

std::vector<IntConstraints> PremiumSurface::vertices() const {
    std::vector<IntConstraints> out;
    out.reserve(values_.size());
    for (int lo = 0; lo <= n_; ++lo)
        for (int hi = lo; hi <= n_; ++hi) out.push_back({lo, hi});
    return out;
}

double interpolate_on_tile(const PremiumSurface& surface, GlobalConstraints q) {
    const int n = surface.horizon();
    if (n == 0) {
        if (!in_triangle(q, 0)) throw ContractViolation("constraints outside T+(0)");
        return surface.at(0, 0);
    }
    const Tile tile = locate_tile(q, n);
    q.hi = std::min(q.hi, static_cast<double>(n));
    const auto verts = tile.vertices();
    const auto w = tile.barycentric(q);
    double value = 0.0;
    for (std::size_t v = 0; v < 3; ++v) value += w[v] * surface.at(verts[v].lo, verts[v].hi);
    return value;
}

}  // namespace swing
