#include <gtest/gtest.h>

#include <random>
#include <set>

#include "swing/contracts.hpp"
#include "swing/errors.hpp"

using namespace swing;

namespace {

RawContract raw(int n, double qmin, double qmax, double Qmin, double Qmax) {
    RawContract c;
    c.n = n;
    c.q_min = qmin;
    c.q_max = qmax;
    c.Q_min = Qmin;
    c.Q_max = Qmax;
    c.strikes.assign(static_cast<std::size_t>(n), 0.0);
    return c;
}

}  // namespace

TEST(NormalizeContract, SplitsSwapAndSwing) {
    const auto a = normalize_contract(raw(2, 1, 3, 3, 5));
    EXPECT_DOUBLE_EQ(a.swap_weight, 1.0);
    EXPECT_DOUBLE_EQ(a.swing_weight, 2.0);
    EXPECT_DOUBLE_EQ(a.constraints.lo, 0.5);
    EXPECT_DOUBLE_EQ(a.constraints.hi, 1.5);

    const auto b = normalize_contract(raw(2, 0, 1, 1, 2));
    EXPECT_DOUBLE_EQ(b.swap_weight, 0.0);
    EXPECT_DOUBLE_EQ(b.swing_weight, 1.0);
    EXPECT_DOUBLE_EQ(b.constraints.lo, 1.0);
    EXPECT_DOUBLE_EQ(b.constraints.hi, 2.0);
}

TEST(NormalizeContract, PureSwap) {
    const auto c = normalize_contract(raw(3, 2, 2, 6, 6));
    EXPECT_TRUE(c.pure_swap);
    EXPECT_DOUBLE_EQ(c.swap_weight, 2.0);
    EXPECT_DOUBLE_EQ(c.swing_weight, 0.0);
}

TEST(NormalizeContract, ClampsToHorizon) {
    const auto c = normalize_contract(raw(2, 0, 1, 0, 7));
    EXPECT_DOUBLE_EQ(c.constraints.hi, 2.0);
    const auto d = normalize_contract(raw(2, 1, 2, 0, 4));
    EXPECT_DOUBLE_EQ(d.constraints.lo, 0.0);
}

TEST(NormalizeContract, RejectsInfeasible) {
    EXPECT_THROW(normalize_contract(raw(2, 0, 1, 3, 4)), InfeasibleContract);
    EXPECT_THROW(normalize_contract(raw(2, 2, 3, 1, 3)), InfeasibleContract);
    EXPECT_THROW(normalize_contract(raw(2, 2, 1, 1, 3)), ContractViolation);
}

TEST(Chi, Examples) {
    const auto a = chi(GlobalConstraints{2, 4}, 1.0, 3);
    EXPECT_EQ(a, (GlobalConstraints{1, 3}));
    const auto b = chi(GlobalConstraints{0, 3}, 0.0, 2);
    EXPECT_EQ(b, (GlobalConstraints{0, 2}));
    const auto c = chi(GlobalConstraints{1, 2}, 1.0, 5);
    EXPECT_EQ(c, (GlobalConstraints{0, 1}));
}

TEST(Chi, RejectsInadmissiblePurchase) {
    EXPECT_THROW(chi(GlobalConstraints{2, 2}, 0.0, 1), ContractViolation);
    EXPECT_THROW(chi(GlobalConstraints{0, 0.5}, 1.0, 2), ContractViolation);
    EXPECT_THROW(chi(GlobalConstraints{0, 1}, 0.5, -1), ContractViolation);
}

TEST(AdmissibleInterval, Examples) {
    auto i = admissible_interval({1, 2}, 2);
    EXPECT_DOUBLE_EQ(i.lo, 0.0);
    EXPECT_DOUBLE_EQ(i.hi, 1.0);
    i = admissible_interval({1.5, 1.8}, 1);
    EXPECT_DOUBLE_EQ(i.lo, 0.5);
    EXPECT_DOUBLE_EQ(i.hi, 1.0);
    i = admissible_interval({0.3, 0.7}, 0);
    EXPECT_DOUBLE_EQ(i.lo, 0.3);
    EXPECT_DOUBLE_EQ(i.hi, 0.7);
}

TEST(AdmissibleInterval, IntegerEndpointsAreBangBang) {
    for (int M = 0; M <= 10; ++M)
        for (int lo = 0; lo <= M + 1; ++lo)
            for (int hi = lo; hi <= M + 1; ++hi) {
                const auto I = admissible_interval({double(lo), double(hi)}, M);
                const bool ok = (I.lo == 0.0 && I.hi == 0.0) || (I.lo == 1.0 && I.hi == 1.0) ||
                                (I.lo == 0.0 && I.hi == 1.0);
                EXPECT_TRUE(ok) << lo << "," << hi << " M=" << M;
            }
}

TEST(Chi, ClosedOnIntegerTriangles) {
    for (int n = 1; n <= 10; ++n)
        for (int k = 0; k < n; ++k) {
            const int M = n - k - 1;
            for (int lo = 0; lo <= n - k; ++lo)
                for (int hi = lo; hi <= n - k; ++hi) {
                    const IntConstraints q{lo, hi};
                    for (int x : bang_bang_actions(q, M)) {
                        ASSERT_TRUE(x == 0 || x == 1);
                        const auto r = chi(q, x, M);
                        EXPECT_TRUE(0 <= r.lo && r.lo <= r.hi && r.hi <= M) << n << " " << k << " " << lo << "," << hi;
                    }
                }
        }
}

TEST(LocateTile, Examples) {
    EXPECT_EQ(locate_tile({0.2, 0.9}, 2), (Tile{0, 0, Orientation::upper}));
    EXPECT_EQ(locate_tile({0.5, 1.2}, 2), (Tile{0, 1, Orientation::lower}));
    EXPECT_EQ(locate_tile({1.2, 1.5}, 2), (Tile{1, 1, Orientation::upper}));
}

TEST(LocateTile, TieBreaks) {
    // Diagonal edge u + 1 = v shared by T+_{01} and T-_{01}.
    EXPECT_EQ(locate_tile({0.5, 1.5}, 2), (Tile{0, 1, Orientation::upper}));
    // Integer points: smallest (i,j), upper first.
    EXPECT_EQ(locate_tile({0, 1}, 2), (Tile{0, 0, Orientation::upper}));
    EXPECT_EQ(locate_tile({1, 2}, 2), (Tile{0, 1, Orientation::upper}));
    EXPECT_EQ(locate_tile({2, 2}, 2), (Tile{1, 1, Orientation::upper}));
    // q_hi clamped to n.
    EXPECT_EQ(locate_tile({1.5, 7.0}, 2), locate_tile({1.5, 2.0}, 2));
}

TEST(LocateTile, RejectsOutside) {
    EXPECT_THROW(locate_tile({1.0, 0.5}, 2), ContractViolation);
    EXPECT_THROW(locate_tile({-0.5, 0.5}, 2), ContractViolation);
    EXPECT_THROW(locate_tile({2.5, 3.0}, 2), ContractViolation);
}

TEST(LocateTile, CoversTriangle) {
    std::mt19937_64 rng(7);
    for (int n = 1; n <= 8; ++n) {
        std::uniform_real_distribution<double> u(0.0, n);
        for (int s = 0; s < 2000; ++s) {
            double a = u(rng), b = u(rng);
            if (a > b) std::swap(a, b);
            const Tile t = locate_tile({a, b}, n);
            EXPECT_TRUE(t.contains({a, b}));
            for (const auto& v : t.vertices()) EXPECT_TRUE(in_triangle(v.as_real(), n));
            if (t.orientation == Orientation::lower) EXPECT_LT(t.i, t.j);
        }
    }
}

TEST(ReachableSet, Examples) {
    EXPECT_EQ(reachable_set({1, 2}, 1, 3), (std::vector<IntConstraints>{{1, 2}, {0, 1}}));
    EXPECT_EQ(reachable_set({1, 2}, 2, 3), (std::vector<IntConstraints>{{1, 1}, {0, 1}, {0, 0}}));
    EXPECT_EQ(reachable_set({0, 0}, 3, 5), (std::vector<IntConstraints>{{0, 0}}));
    EXPECT_EQ(reachable_set({0, 3}, 2, 3), (std::vector<IntConstraints>{{0, 1}}));
}

TEST(ReachableSet, RejectsOutsideTriangle) {
    EXPECT_THROW(reachable_set({2, 1}, 0, 3), ContractViolation);
    EXPECT_THROW(reachable_set({0, 4}, 0, 3), ContractViolation);
    EXPECT_THROW(reachable_set({0, 1}, 4, 3), ContractViolation);
}

// Forward enumeration of every {0,1} path through the admissible intervals.
TEST(ReachableSet, MatchesEnumerationAndCount) {
    for (int n = 1; n <= 12; ++n)
        for (int lo = 0; lo <= n; ++lo)
            for (int hi = lo; hi <= n; ++hi) {
                std::set<IntConstraints> layer{{lo, hi}};
                for (int k = 0; k <= n; ++k) {
                    const auto rs = reachable_set({lo, hi}, k, n);
                    const std::set<IntConstraints> got(rs.begin(), rs.end());
                    ASSERT_EQ(got.size(), rs.size()) << "duplicates";
                    ASSERT_EQ(got, layer) << n << " (" << lo << "," << hi << ") k=" << k;
                    ASSERT_EQ(reachable_count({lo, hi}, k, n), rs.size());
                    for (std::size_t i = 1; i < rs.size(); ++i)
                        EXPECT_TRUE(rs[i].lo <= rs[i - 1].lo && rs[i].hi <= rs[i - 1].hi);
                    if (k == n) break;
                    std::set<IntConstraints> next;
                    for (const auto& q : layer)
                        for (int x : bang_bang_actions(q, n - k - 1)) next.insert(chi(q, x, n - k - 1));
                    layer = std::move(next);
                }
            }
}

TEST(ReachableSet, ClosedUnderActions) {
    for (int n = 1; n <= 12; ++n)
        for (int lo = 0; lo <= n; ++lo)
            for (int hi = lo; hi <= n; ++hi)
                for (int k = 0; k < n; ++k) {
                    const auto next = reachable_set({lo, hi}, k + 1, n);
                    const std::set<IntConstraints> nset(next.begin(), next.end());
                    for (const auto& q : reachable_set({lo, hi}, k, n))
                        for (int x : bang_bang_actions(q, n - k - 1)) EXPECT_TRUE(nset.count(chi(q, x, n - k - 1)));
                }
}

TEST(PremiumSurface, StorageAndErrors) {
    PremiumSurface s(3);
    EXPECT_EQ(s.vertices().size(), triangle_vertex_count(3));
    EXPECT_FALSE(s.has(0, 2));
    EXPECT_THROW((void)s.at(0, 2), SurfaceIncomplete);
    s.set(0, 2, 1.5);
    EXPECT_DOUBLE_EQ(s.at(0, 2), 1.5);
    EXPECT_THROW(s.set(2, 1, 0.0), ContractViolation);
    EXPECT_THROW(s.set(0, 4, 0.0), ContractViolation);
}

TEST(Interpolate, Example) {
    PremiumSurface s(1);
    s.set(0, 0, 0.0);
    s.set(0, 1, 4.0);
    s.set(1, 1, 2.0);
    EXPECT_DOUBLE_EQ(interpolate_on_tile(s, {0.25, 0.75}), 2.5);
    EXPECT_DOUBLE_EQ(interpolate_on_tile(s, {0.0, 1.0}), 4.0);
}

TEST(Interpolate, MissingVertexThrows) {
    PremiumSurface s(2);
    s.set(0, 0, 0.0);
    s.set(0, 1, 1.0);
    EXPECT_THROW(interpolate_on_tile(s, {0.25, 0.75}), SurfaceIncomplete);
}

TEST(Interpolate, ReproducesAffineFunctions) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> coef(-3.0, 3.0);
    for (int n = 1; n <= 7; ++n) {
        const double a = coef(rng), b = coef(rng), c = coef(rng);
        PremiumSurface s(n);
        for (const auto& v : s.vertices()) s.set(v.lo, v.hi, a * v.lo + b * v.hi + c);
        std::uniform_real_distribution<double> u(0.0, n);
        for (int t = 0; t < 500; ++t) {
            double x = u(rng), y = u(rng);
            if (x > y) std::swap(x, y);
            EXPECT_NEAR(interpolate_on_tile(s, {x, y}), a * x + b * y + c, 1e-12);
        }
    }
}

TEST(Interpolate, ExactAtVerticesAndContinuousAcrossEdges) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> val(-1.0, 1.0), t(0.0, 1.0);
    const int n = 5;
    PremiumSurface s(n);
    for (const auto& v : s.vertices()) s.set(v.lo, v.hi, val(rng));
    for (const auto& v : s.vertices()) EXPECT_DOUBLE_EQ(interpolate_on_tile(s, v.as_real()), s.at(v.lo, v.hi));
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            const Tile up{i, j, Orientation::upper};
            const double r = t(rng);
            // Edge shared with the lower tile (diagonal) and with neighbours.
            const GlobalConstraints diag{i + r, j + r};
            const auto w = up.barycentric(diag);
            const auto vu = up.vertices();
            const double from_upper = w[0] * s.at(vu[0].lo, vu[0].hi) + w[1] * s.at(vu[1].lo, vu[1].hi) + w[2] * s.at(vu[2].lo, vu[2].hi);
            if (i < j) {
                const Tile lo{i, j, Orientation::lower};
                const auto wl = lo.barycentric(diag);
                const auto vl = lo.vertices();
                const double from_lower = wl[0] * s.at(vl[0].lo, vl[0].hi) + wl[1] * s.at(vl[1].lo, vl[1].hi) +
                                          wl[2] * s.at(vl[2].lo, vl[2].hi);
                EXPECT_NEAR(from_upper, from_lower, 1e-12);
            }
            EXPECT_NEAR(interpolate_on_tile(s, diag), from_upper, 1e-12);
        }
}
