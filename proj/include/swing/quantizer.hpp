#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace swing {

/// Row-major set of d-dimensional points.
class PointSet {
public:
    PointSet() = default;
    PointSet(std::size_t dim, std::vector<double> coords);
    PointSet(std::size_t dim, std::size_t count) : dim_(dim), coords_(dim * count, 0.0) {}

    [[nodiscard]] std::size_t dim() const { return dim_; }
    [[nodiscard]] std::size_t size() const { return dim_ == 0 ? 0 : coords_.size() / dim_; }
    [[nodiscard]] bool empty() const { return size() == 0; }
    [[nodiscard]] std::span<const double> operator[](std::size_t i) const {
        return {coords_.data() + i * dim_, dim_};
    }
    [[nodiscard]] std::span<double> operator[](std::size_t i) { return {coords_.data() + i * dim_, dim_}; }
    [[nodiscard]] const std::vector<double>& coords() const { return coords_; }
    [[nodiscard]] std::vector<double>& coords() { return coords_; }
    void push_back(std::span<const double> p);

    friend bool operator==(const PointSet&, const PointSet&) = default;

private:
    std::size_t dim_ = 0;
    std::vector<double> coords_;
};

/// Finite grid of N points in R^d, optionally with the probabilities of their
/// Voronoi cells.
class Codebook {
public:
    Codebook() = default;
    explicit Codebook(PointSet points, std::vector<double> weights = {});

    [[nodiscard]] std::size_t dim() const { return points_.dim(); }
    [[nodiscard]] std::size_t size() const { return points_.size(); }
    [[nodiscard]] std::span<const double> point(std::size_t i) const { return points_[i]; }
    [[nodiscard]] const PointSet& points() const { return points_; }
    [[nodiscard]] bool has_weights() const { return !weights_.empty(); }
    [[nodiscard]] const std::vector<double>& weights() const { return weights_; }
    void set_weights(std::vector<double> weights);

    /// Checks distinct points and, when present, a probability weight vector.
    void validate() const;

    friend bool operator==(const Codebook&, const Codebook&) = default;

private:
    PointSet points_;
    std::vector<double> weights_;
};

/// Smallest index minimizing the Euclidean distance to y (linear scan).
std::size_t nearest_index(std::span<const double> y, const Codebook& cb);

inline constexpr std::size_t kNoHint = static_cast<std::size_t>(-1);

/// Exact nearest-neighbor search over a fixed codebook. Points are sorted by
/// their projection on the principal axis and the scan stops once the
/// projected gap alone exceeds the best candidate; ties still resolve to the
/// smallest index.
class NearestSearcher {
public:
    explicit NearestSearcher(const Codebook& cb);

    [[nodiscard]] std::size_t operator()(std::span<const double> y) const;
    /// Same as operator() and also returns the squared distance.
    /// A hint (e.g. the previous assignment) only speeds up the search.
    [[nodiscard]] std::size_t nearest(std::span<const double> y, double& sq_dist, std::size_t hint = kNoHint) const;

private:
    [[nodiscard]] double project(std::span<const double> y) const;

    std::size_t dim_;
    std::vector<double> axis_;         // unit sort direction
    std::vector<double> sorted_;       // points in sorted order, row-major
    std::vector<double> keys_;         // projections, ascending
    std::vector<std::size_t> position_;  // original index -> sorted position
    std::vector<std::size_t> original_;
};

/// (mean over samples of min_i |y - x_i|^p)^(1/p).
double distortion(const PointSet& samples, const Codebook& cb, double p = 2.0);

struct OptimizerReport {
    std::size_t iterations = 0;
    double final_distortion = 0.0;          // quadratic distortion (mean squared distance)
    std::vector<double> distortion_history;  // one entry per assignment pass
    double stationarity_residual = 0.0;
    std::size_t reseeded_cells = 0;
    bool converged = false;
};

struct LloydOptions {
    std::size_t max_iter = 500;
    double tol = 1e-6;
    unsigned threads = 1;
};

struct LloydResult {
    Codebook codebook;
    OptimizerReport report;
};

/// Lloyd I fixed-point iteration on the empirical measure of `samples`.
/// Returned weights are the empirical cell frequencies of the returned points.
LloydResult lloyd_optimize(const PointSet& samples, const Codebook& initial, const LloydOptions& opts = {});

struct ClvqOptions {
    std::size_t steps = 0;
    double a = 1.0;
    double b = 0.0;        // 0 selects 100 * N
    std::size_t holdout = 10000;
};

/// Produces one sample per call, written into the span.
using SampleStream = std::function<void(std::span<double>)>;

/// Competitive learning: each sample pulls its nearest point by a/(b+t).
/// Distortion and weights are estimated on `holdout` further stream samples.
LloydResult clvq_optimize(const SampleStream& stream, const Codebook& initial, const ClvqOptions& opts);

struct NewtonResult {
    Codebook codebook;
    std::size_t iterations = 0;
    double gradient_norm = 0.0;
    double distortion = 0.0;  // exact quadratic distortion under N(0,1)
    bool converged = false;
};

/// Quadratic-optimal N-point quantizer of the standard normal by Newton's
/// method on the distortion gradient (tridiagonal Hessian). Non-convergence is
/// reported through `converged` with the last iterate kept.
NewtonResult newton_optimize_1d_normal(std::size_t n, std::size_t max_iter = 100, double tol = 1e-12);

/// Exact quadratic distortion of a sorted 1-D grid under N(0,1), with cell weights.
double normal_grid_distortion(std::span<const double> sorted_points, std::vector<double>* weights = nullptr);

/// Codebook text interchange: "d,N", then N coordinate rows, then optionally N
/// weight rows.
void write_codebook_csv(std::ostream& os, const Codebook& cb);
Codebook read_codebook_csv(std::istream& is);
void write_codebook_binary(std::ostream& os, const Codebook& cb);
Codebook read_codebook_binary(std::istream& is);

}  // namespace swing
