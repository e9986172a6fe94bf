#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "swing/errors.hpp"
#include "swing/quantizer.hpp"

using namespace swing;

namespace {

Codebook grid1d(std::vector<double> pts, std::vector<double> w = {}) {
    return Codebook(PointSet(1, std::move(pts)), std::move(w));
}

PointSet normal_samples(std::size_t m, std::uint64_t seed, std::size_t d = 1) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    std::vector<double> c(m * d);
    for (auto& x : c) x = g(rng);
    return PointSet(d, std::move(c));
}

const double kHalfNormalMean = std::sqrt(2.0 / std::numbers::pi);

}  // namespace

TEST(Codebook, Validation) {
    EXPECT_THROW(Codebook(PointSet(1, std::vector<double>{})), ContractViolation);
    EXPECT_THROW(grid1d({0.0, 1.0}, {1.0}), ContractViolation);
    EXPECT_THROW(grid1d({0.0, 0.0}).validate(), ContractViolation);
    EXPECT_THROW(grid1d({0.0, 1.0}, {0.7, 0.7}).validate(), ContractViolation);
    EXPECT_THROW(grid1d({0.0, 1.0}, {1.2, -0.2}).validate(), ContractViolation);
    EXPECT_NO_THROW(grid1d({0.0, 1.0}, {0.25, 0.75}).validate());
}

TEST(NearestIndex, Examples) {
    const auto cb = grid1d({-1.0, 0.5, 2.0});
    const std::vector<double> y0{0.0}, y1{-0.25}, y2{10.0};
    EXPECT_EQ(nearest_index(y0, cb), 1u);
    EXPECT_EQ(nearest_index(y1, cb), 0u);
    EXPECT_EQ(nearest_index(y2, cb), 2u);
    const std::vector<double> bad{0.0, 1.0};
    EXPECT_THROW((void)nearest_index(bad, cb), ContractViolation);
}

TEST(NearestSearcher, AgreesWithLinearScan) {
    std::mt19937_64 rng(13);
    std::normal_distribution<double> g;
    std::uniform_int_distribution<int> coarse(-3, 3);
    for (std::size_t d = 1; d <= 4; ++d) {
        for (std::size_t n : {1, 2, 7, 50, 300}) {
            std::vector<double> c;
            for (std::size_t i = 0; i < n * d; ++i) c.push_back(d == 2 && i % 2 ? 0.2 * g(rng) : g(rng));
            const Codebook cb(PointSet(d, c));
            const NearestSearcher search(cb);
            std::vector<double> y(d);
            for (int t = 0; t < 3000; ++t) {
                // Half the queries on a coarse lattice to provoke exact ties.
                for (auto& v : y) v = t % 2 ? g(rng) * 1.5 : 0.5 * coarse(rng);
                double sq;
                const std::size_t hint = static_cast<std::size_t>(t) % n;
                ASSERT_EQ(search(y), nearest_index(y, cb));
                ASSERT_EQ(search.nearest(y, sq, hint), nearest_index(y, cb));
            }
        }
    }
    // Exact ties between duplicate-distance points resolve to the smallest index.
    const auto sym = grid1d({1.0, -1.0, 3.0});
    const std::vector<double> zero{0.0};
    EXPECT_EQ(NearestSearcher(sym)(zero), 0u);
}

TEST(NearestIndex, Deterministic) {
    const auto cb = grid1d({-1.0, 0.5, 2.0});
    const std::vector<double> y{0.123456};
    const auto a = nearest_index(y, cb);
    for (int i = 0; i < 100; ++i) EXPECT_EQ(nearest_index(y, cb), a);
}

TEST(Distortion, Examples) {
    const PointSet s1(1, std::vector<double>{-1.0, 1.0});
    EXPECT_DOUBLE_EQ(distortion(s1, grid1d({0.0}), 2.0), 1.0);
    EXPECT_DOUBLE_EQ(distortion(s1, grid1d({-1.0, 1.0}), 2.0), 0.0);
    const PointSet s2(1, std::vector<double>{0.0, 2.0});
    EXPECT_DOUBLE_EQ(distortion(s2, grid1d({0.0}), 1.0), 1.0);
    EXPECT_THROW((void)distortion(PointSet(1, std::vector<double>{}), grid1d({0.0}), 2.0), ContractViolation);
    EXPECT_THROW((void)distortion(s1, grid1d({0.0}), 0.5), ContractViolation);
}

TEST(Lloyd, SymmetricFixedPoint) {
    const PointSet s(1, std::vector<double>{-2.0, -1.0, 1.0, 2.0});
    const auto r = lloyd_optimize(s, grid1d({-1.5, 1.5}));
    EXPECT_DOUBLE_EQ(r.codebook.point(0)[0], -1.5);
    EXPECT_DOUBLE_EQ(r.codebook.point(1)[0], 1.5);
    EXPECT_DOUBLE_EQ(r.report.final_distortion, 0.25);
    EXPECT_EQ(r.report.iterations, 1u);
    EXPECT_TRUE(r.report.converged);
    EXPECT_EQ(r.report.stationarity_residual, 0.0);
    EXPECT_EQ(r.codebook.weights(), (std::vector<double>{0.5, 0.5}));
}

TEST(Lloyd, SinglePointIsSampleMean) {
    const auto s = normal_samples(1001, 5, 2);
    const auto r = lloyd_optimize(s, Codebook(PointSet(2, std::vector<double>{3.0, -3.0})));
    double m0 = 0.0, m1 = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        m0 += s[i][0];
        m1 += s[i][1];
    }
    EXPECT_NEAR(r.codebook.point(0)[0], m0 / s.size(), 1e-12);
    EXPECT_NEAR(r.codebook.point(0)[1], m1 / s.size(), 1e-12);
}

TEST(Lloyd, TwoPointNormal) {
    const auto s = normal_samples(1000000, 17);
    const auto r = lloyd_optimize(s, grid1d({-0.1, 0.3}));
    EXPECT_NEAR(r.codebook.point(0)[0], -kHalfNormalMean, 0.02);
    EXPECT_NEAR(r.codebook.point(1)[0], kHalfNormalMean, 0.02);
    EXPECT_TRUE(r.report.converged);
}

TEST(Lloyd, HistoryNonIncreasingAndWeightsValid) {
    std::mt19937_64 rng(31);
    for (int run = 0; run < 12; ++run) {
        const std::size_t d = 1 + run % 3;
        const auto s = normal_samples(20000, 100 + run, d);
        const std::size_t n = 5 + 7 * run;
        // Clustered start forces empty cells and re-seeding.
        std::vector<double> c;
        for (std::size_t i = 0; i < n * d; ++i) c.push_back(1e-3 * static_cast<double>(i) + (run % 2 ? 4.0 : 0.0));
        LloydOptions o;
        o.tol = 1e-8;
        const auto r = lloyd_optimize(s, Codebook(PointSet(d, c)), o);
        const auto& h = r.report.distortion_history;
        for (std::size_t i = 1; i < h.size(); ++i) EXPECT_LE(h[i], h[i - 1]) << "run " << run << " step " << i;
        EXPECT_NO_THROW(r.codebook.validate());
        EXPECT_EQ(r.codebook.size(), n);
        double total = 0.0;
        for (double w : r.codebook.weights()) {
            EXPECT_GE(w, 0.0);
            total += w;
        }
        EXPECT_NEAR(total, 1.0, 1e-9);
    }
}

TEST(Lloyd, StationarityAtExit) {
    // Small sample sets reach an exact fixed point.
    for (int run = 0; run < 10; ++run) {
        const auto s = normal_samples(500, 300 + run, 2);
        std::vector<double> c;
        for (std::size_t i = 0; i < 8; ++i) c.insert(c.end(), {s[i][0], s[i][1]});
        LloydOptions o;
        o.tol = 0.0;
        o.max_iter = 10000;
        const auto r = lloyd_optimize(s, Codebook(PointSet(2, c)), o);
        ASSERT_TRUE(r.report.converged);
        double lo = 1e300, hi = -1e300;
        for (double v : s.coords()) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        EXPECT_LE(r.report.stationarity_residual, 10.0 * 1e-6 * (hi - lo));
    }
}

TEST(Lloyd, ThreadCountDoesNotChangeResult) {
    const auto s = normal_samples(100000, 9, 2);
    std::vector<double> c;
    for (std::size_t i = 0; i < 20; ++i) c.insert(c.end(), {s[i][0], s[i][1]});
    LloydOptions a, b;
    a.threads = 1;
    b.threads = 4;
    const auto ra = lloyd_optimize(s, Codebook(PointSet(2, c)), a);
    const auto rb = lloyd_optimize(s, Codebook(PointSet(2, c)), b);
    EXPECT_EQ(ra.codebook, rb.codebook);
    EXPECT_EQ(ra.report.distortion_history, rb.report.distortion_history);
}

TEST(Clvq, ZeroStepsReturnsInitial) {
    const auto init = grid1d({-0.5, 0.5});
    const auto r = clvq_optimize([](std::span<double> y) { y[0] = 1.0; }, init, ClvqOptions{});
    EXPECT_EQ(r.codebook.points().coords(), init.points().coords());
}

TEST(Clvq, TwoPointLaw) {
    bool flip = false;
    ClvqOptions o;
    o.steps = 100000;
    const auto r = clvq_optimize(
        [&](std::span<double> y) {
            y[0] = flip ? 1.0 : -1.0;
            flip = !flip;
        },
        grid1d({-0.5, 0.5}), o);
    EXPECT_NEAR(r.codebook.point(0)[0], -1.0, 0.05);
    EXPECT_NEAR(r.codebook.point(1)[0], 1.0, 0.05);
}

TEST(Clvq, TwoPointNormal) {
    std::mt19937_64 rng(23);
    std::normal_distribution<double> g;
    ClvqOptions o;
    o.steps = 1000000;
    const auto r = clvq_optimize([&](std::span<double> y) { y[0] = g(rng); }, grid1d({-0.1, 0.3}), o);
    EXPECT_NEAR(r.codebook.point(0)[0], -kHalfNormalMean, 0.05);
    EXPECT_NEAR(r.codebook.point(1)[0], kHalfNormalMean, 0.05);
    EXPECT_GT(r.report.final_distortion, 0.0);
    double total = 0.0;
    for (double w : r.codebook.weights()) total += w;
    EXPECT_NEAR(total, 1.0, 1e-9);
}

TEST(Newton, SmallSizes) {
    const auto one = newton_optimize_1d_normal(1);
    ASSERT_EQ(one.codebook.size(), 1u);
    EXPECT_NEAR(one.codebook.point(0)[0], 0.0, 1e-15);
    const auto two = newton_optimize_1d_normal(2);
    EXPECT_TRUE(two.converged);
    EXPECT_NEAR(two.codebook.point(0)[0], -kHalfNormalMean, 1e-5);
    EXPECT_NEAR(two.codebook.point(1)[0], kHalfNormalMean, 1e-5);
    EXPECT_NEAR(two.distortion, 1.0 - 2.0 / std::numbers::pi, 1e-12);
}

TEST(Newton, ThreePointsMatchLloyd) {
    const auto nt = newton_optimize_1d_normal(3);
    ASSERT_TRUE(nt.converged);
    const auto s = normal_samples(10000000, 41);
    LloydOptions o;
    o.tol = 1e-10;
    const auto ll = lloyd_optimize(s, grid1d({-1.0, 0.0, 1.0}), o);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(nt.codebook.point(i)[0], ll.codebook.point(i)[0], 2e-3);
}

TEST(Newton, SymmetricStationaryAndWeighted) {
    for (std::size_t n : {4, 9, 20, 80}) {
        const auto r = newton_optimize_1d_normal(n);
        ASSERT_TRUE(r.converged) << n;
        for (std::size_t i = 0; i < n; ++i)
            EXPECT_NEAR(r.codebook.point(i)[0], -r.codebook.point(n - 1 - i)[0], 1e-10);
        for (std::size_t i = 1; i < n; ++i) EXPECT_LT(r.codebook.point(i - 1)[0], r.codebook.point(i)[0]);
        EXPECT_NO_THROW(r.codebook.validate());
        EXPECT_LT(r.gradient_norm, 1e-9);
    }
}

TEST(Newton, ZadorRate) {
    std::vector<double> x, y;
    double prev = 1e300;
    for (std::size_t n : {10, 20, 40, 80}) {
        const auto r = newton_optimize_1d_normal(n);
        ASSERT_TRUE(r.converged);
        const double e = std::sqrt(r.distortion);
        EXPECT_LT(e, prev);
        prev = e;
        x.push_back(std::log(static_cast<double>(n)));
        y.push_back(std::log(e));
    }
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i] / x.size();
        my += y[i] / y.size();
    }
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    const double slope = sxy / sxx;
    EXPECT_GE(slope, -1.3);
    EXPECT_LE(slope, -0.7);
}

TEST(CodebookIO, CsvAndBinaryRoundTrip) {
    const auto s = normal_samples(30, 2, 3);
    Codebook cb(s, std::vector<double>(30, 1.0 / 30));
    std::stringstream csv;
    write_codebook_csv(csv, cb);
    EXPECT_EQ(read_codebook_csv(csv), cb);
    std::stringstream bin;
    write_codebook_binary(bin, cb);
    EXPECT_EQ(read_codebook_binary(bin), cb);
    Codebook plain(s);
    std::stringstream csv2;
    write_codebook_csv(csv2, plain);
    EXPECT_EQ(read_codebook_csv(csv2), plain);
}

TEST(CodebookIO, RejectsMalformed) {
    std::stringstream a("2,3\n1,2\n3,4\n");
    EXPECT_THROW(read_codebook_csv(a), ContractViolation);
    std::stringstream b("1,2\n1\nx\n");
    EXPECT_THROW(read_codebook_csv(b), ContractViolation);
    std::stringstream c("JUNKJUNK");
    EXPECT_THROW(read_codebook_binary(c), ContractViolation);
}
