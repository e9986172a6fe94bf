#include "swing/quantizer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include "swing/errors.hpp"
#include "swing/normal.hpp"
#include "swing/parallel.hpp"

namespace swing {

namespace {

inline double sq_dist(const double* a, const double* b, std::size_t d) {
    double s = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
        const double t = a[k] - b[k];
        s += t * t;
    }
    return s;
}

std::string fmt_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::vector<double> parse_row(const std::string& line) {
    std::vector<double> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        char* end = nullptr;
        const double v = std::strtod(cell.c_str(), &end);
        if (end == cell.c_str()) throw ContractViolation("codebook CSV: cannot parse '" + cell + "'");
        out.push_back(v);
    }
    return out;
}

bool next_line(std::istream& is, std::string& line) {
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) return true;
    }
    return false;
}

constexpr std::size_t kLloydShard = 16384;

struct ShardStats {
    std::vector<double> sums;
    std::vector<std::size_t> counts;
    double sq_total = 0.0;
};

}  // namespace

PointSet::PointSet(std::size_t dim, std::vector<double> coords) : dim_(dim), coords_(std::move(coords)) {
    SWING_REQUIRE(dim > 0, "point dimension must be positive");
    SWING_REQUIRE(coords_.size() % dim == 0, "coordinate count is not a multiple of the dimension");
}

void PointSet::push_back(std::span<const double> p) {
    if (dim_ == 0) dim_ = p.size();
    SWING_REQUIRE(p.size() == dim_, "point dimension mismatch");
    coords_.insert(coords_.end(), p.begin(), p.end());
}

Codebook::Codebook(PointSet points, std::vector<double> weights)
    : points_(std::move(points)), weights_(std::move(weights)) {
    SWING_REQUIRE(points_.size() > 0, "codebook must hold at least one point");
    SWING_REQUIRE(weights_.empty() || weights_.size() == points_.size(), "one weight per point expected");
}

void Codebook::set_weights(std::vector<double> weights) {
    SWING_REQUIRE(weights.empty() || weights.size() == size(), "one weight per point expected");
    weights_ = std::move(weights);
}

void Codebook::validate() const {
    const std::size_t n = size(), d = dim();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            SWING_REQUIRE(sq_dist(point(i).data(), point(j).data(), d) > 0.0, "codebook points must be distinct");
    if (!weights_.empty()) {
        double total = 0.0;
        for (double w : weights_) {
            SWING_REQUIRE(w >= 0.0, "codebook weights must be non-negative");
            total += w;
        }
        SWING_REQUIRE(std::abs(total - 1.0) <= 1e-9, "codebook weights must sum to 1");
    }
}

std::size_t nearest_index(std::span<const double> y, const Codebook& cb) {
    SWING_REQUIRE(cb.size() > 0, "empty codebook");
    SWING_REQUIRE(y.size() == cb.dim(), "dimension mismatch between point and codebook");
    const std::size_t d = cb.dim();
    const double* pts = cb.points().coords().data();
    std::size_t best = 0;
    double best_sq = sq_dist(y.data(), pts, d);
    for (std::size_t i = 1; i < cb.size(); ++i) {
        const double s = sq_dist(y.data(), pts + i * d, d);
        if (s < best_sq) {
            best_sq = s;
            best = i;
        }
    }
    return best;
}

NearestSearcher::NearestSearcher(const Codebook& cb) : dim_(cb.dim()), axis_(cb.dim(), 0.0) {
    SWING_REQUIRE(cb.size() > 0, "empty codebook");
    const std::size_t n = cb.size();
    // Sort on the principal axis of the points: any unit direction gives a
    // lower bound on the distance, the widest one prunes best.
    std::vector<double> mean(dim_, 0.0), cov(dim_ * dim_, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t a = 0; a < dim_; ++a) mean[a] += cb.point(i)[a] / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto p = cb.point(i);
        for (std::size_t a = 0; a < dim_; ++a)
            for (std::size_t b = 0; b < dim_; ++b) cov[a * dim_ + b] += (p[a] - mean[a]) * (p[b] - mean[b]);
    }
    std::size_t widest = 0;
    for (std::size_t a = 1; a < dim_; ++a)
        if (cov[a * dim_ + a] > cov[widest * dim_ + widest]) widest = a;
    axis_[widest] = 1.0;
    std::vector<double> next(dim_);
    for (int it = 0; it < 64 && dim_ > 1; ++it) {
        double norm = 0.0;
        for (std::size_t a = 0; a < dim_; ++a) {
            next[a] = 0.0;
            for (std::size_t b = 0; b < dim_; ++b) next[a] += cov[a * dim_ + b] * axis_[b];
            norm += next[a] * next[a];
        }
        if (!(norm > 0.0)) break;
        norm = std::sqrt(norm);
        for (std::size_t a = 0; a < dim_; ++a) axis_[a] = next[a] / norm;
    }

    std::vector<double> key(n);
    for (std::size_t i = 0; i < n; ++i) key[i] = project(cb.point(i));
    original_.resize(n);
    std::iota(original_.begin(), original_.end(), std::size_t{0});
    std::stable_sort(original_.begin(), original_.end(), [&](std::size_t a, std::size_t b) { return key[a] < key[b]; });
    sorted_.reserve(n * dim_);
    keys_.reserve(n);
    position_.resize(n);
    for (std::size_t pos = 0; pos < n; ++pos) {
        const std::size_t idx = original_[pos];
        const auto p = cb.point(idx);
        sorted_.insert(sorted_.end(), p.begin(), p.end());
        keys_.push_back(key[idx]);
        position_[idx] = pos;
    }
}

double NearestSearcher::project(std::span<const double> y) const {
    double s = 0.0;
    for (std::size_t a = 0; a < dim_; ++a) s += axis_[a] * y[a];
    return s;
}

std::size_t NearestSearcher::operator()(std::span<const double> y) const {
    double unused;
    return nearest(y, unused);
}

std::size_t NearestSearcher::nearest(std::span<const double> y, double& sq_dist_out, std::size_t hint) const {
    SWING_REQUIRE(y.size() == dim_, "dimension mismatch between point and codebook");
    const std::size_t n = keys_.size();
    const double y0 = project(y);
    std::size_t right = static_cast<std::size_t>(std::lower_bound(keys_.begin(), keys_.end(), y0) - keys_.begin());
    std::size_t left = right;  // next candidate on the left is left-1
    double best_sq = std::numeric_limits<double>::infinity();
    std::size_t best = std::numeric_limits<std::size_t>::max();

    auto visit = [&](std::size_t pos) {
        const double s = sq_dist(y.data(), sorted_.data() + pos * dim_, dim_);
        const std::size_t idx = original_[pos];
        if (s < best_sq || (s == best_sq && idx < best)) {
            best_sq = s;
            best = idx;
        }
    };
    if (hint < n) visit(position_[hint]);
    bool left_open = left > 0, right_open = right < n;
    while (left_open || right_open) {
        double gap_l = std::numeric_limits<double>::infinity();
        double gap_r = std::numeric_limits<double>::infinity();
        if (left_open) {
            const double g = y0 - keys_[left - 1];
            gap_l = g * g;
            if (gap_l > best_sq) left_open = false;
        }
        if (right_open) {
            const double g = keys_[right] - y0;
            gap_r = g * g;
            if (gap_r > best_sq) right_open = false;
        }
        if (left_open && (!right_open || gap_l <= gap_r)) {
            visit(--left);
            left_open = left > 0;
        } else if (right_open) {
            visit(right++);
            right_open = right < n;
        }
    }
    sq_dist_out = best_sq;
    return best;
}

double distortion(const PointSet& samples, const Codebook& cb, double p) {
    SWING_REQUIRE(!samples.empty(), "distortion needs at least one sample");
    SWING_REQUIRE(p >= 1.0, "distortion exponent must be >= 1");
    SWING_REQUIRE(samples.dim() == cb.dim(), "dimension mismatch between samples and codebook");
    const NearestSearcher search(cb);
    double total = 0.0;
    for (std::size_t s = 0; s < samples.size(); ++s) {
        double sq;
        (void)search.nearest(samples[s], sq);
        total += p == 2.0 ? sq : std::pow(std::sqrt(sq), p);
    }
    return std::pow(total / static_cast<double>(samples.size()), 1.0 / p);
}

LloydResult lloyd_optimize(const PointSet& samples, const Codebook& initial, const LloydOptions& opts) {
    SWING_REQUIRE(!samples.empty(), "Lloyd needs samples");
    SWING_REQUIRE(samples.dim() == initial.dim(), "dimension mismatch between samples and codebook");
    SWING_REQUIRE(initial.size() <= samples.size(), "codebook larger than the sample set");
    const std::size_t d = samples.dim();
    const std::size_t m = samples.size();
    const std::size_t shards = (m + kLloydShard - 1) / kLloydShard;

    PointSet points = initial.points();
    OptimizerReport report;
    std::vector<std::size_t> assignment(m);

    for (std::size_t it = 1;; ++it) {
        const std::size_t n = points.size();
        const Codebook current(points);
        const NearestSearcher search(current);
        std::vector<ShardStats> stats(shards);
        std::vector<double> sample_sq(m);
        parallel_blocks(shards, opts.threads, [&](std::size_t b) {
            ShardStats& st = stats[b];
            st.sums.assign(n * d, 0.0);
            st.counts.assign(n, 0);
            const std::size_t end = std::min(m, (b + 1) * kLloydShard);
            for (std::size_t s = b * kLloydShard; s < end; ++s) {
                double sq;
                const std::size_t i = search.nearest(samples[s], sq, it > 1 ? assignment[s] : kNoHint);
                assignment[s] = i;
                sample_sq[s] = sq;
                st.sq_total += sq;
                ++st.counts[i];
                const auto y = samples[s];
                for (std::size_t k = 0; k < d; ++k) st.sums[i * d + k] += y[k];
            }
        });
        std::vector<double> sums(n * d, 0.0);
        std::vector<std::size_t> counts(n, 0);
        double sq_total = 0.0;
        for (const auto& st : stats) {
            for (std::size_t j = 0; j < n * d; ++j) sums[j] += st.sums[j];
            for (std::size_t j = 0; j < n; ++j) counts[j] += st.counts[j];
            sq_total += st.sq_total;
        }
        const double D = sq_total / static_cast<double>(m);
        report.distortion_history.push_back(D);
        report.iterations = it;

        std::vector<std::size_t> empty;
        for (std::size_t i = 0; i < n; ++i)
            if (counts[i] == 0) empty.push_back(i);

        PointSet centroids(d, n);
        double residual = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (counts[i] == 0) continue;
            double r = 0.0;
            for (std::size_t k = 0; k < d; ++k) {
                centroids[i][k] = sums[i * d + k] / static_cast<double>(counts[i]);
                const double t = centroids[i][k] - points[i][k];
                r += t * t;
            }
            residual = std::max(residual, std::sqrt(r));
        }
        report.stationarity_residual = residual;

        if (empty.empty()) {
            const std::size_t h = report.distortion_history.size();
            const bool fixed = residual == 0.0;
            const bool flat = h >= 2 && (report.distortion_history[h - 2] - D) <= opts.tol * report.distortion_history[h - 2];
            report.converged = fixed || flat || D == 0.0;
            if (report.converged || it >= opts.max_iter) {
                std::vector<double> w(n);
                for (std::size_t i = 0; i < n; ++i) w[i] = static_cast<double>(counts[i]) / static_cast<double>(m);
                report.final_distortion = D;
                return {Codebook(std::move(points), std::move(w)), report};
            }
            points = std::move(centroids);
            continue;
        }

        // Empty cells: move non-empty points to their centroids and re-seed
        // each empty one at the sample farthest from its assigned point.
        std::vector<std::size_t> order(m);
        std::iota(order.begin(), order.end(), std::size_t{0});
        const std::size_t take = std::min(empty.size(), m);
        std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                          [&](std::size_t a, std::size_t b) {
                              return sample_sq[a] > sample_sq[b] || (sample_sq[a] == sample_sq[b] && a < b);
                          });
        PointSet next(d, 0);
        std::size_t used = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (counts[i] > 0) {
                next.push_back(centroids[i]);
            } else if (used < take && sample_sq[order[used]] > 0.0) {
                next.push_back(samples[order[used++]]);
                ++report.reseeded_cells;
            }
            // otherwise every sample sits on a grid point: the cell is dropped
        }
        points = std::move(next);
        if (it >= opts.max_iter) {
            // Final pass so the returned weights match the returned points.
            LloydOptions last = opts;
            last.max_iter = 1;
            auto tail = lloyd_optimize(samples, Codebook(points), last);
            report.distortion_history.push_back(tail.report.final_distortion);
            report.final_distortion = tail.report.final_distortion;
            report.stationarity_residual = tail.report.stationarity_residual;
            return {std::move(tail.codebook), report};
        }
    }
}

LloydResult clvq_optimize(const SampleStream& stream, const Codebook& initial, const ClvqOptions& opts) {
    const std::size_t d = initial.dim();
    const std::size_t n = initial.size();
    const double b = opts.b > 0.0 ? opts.b : 100.0 * static_cast<double>(n);
    PointSet points = initial.points();
    std::vector<double> y(d);
    double* pts = points.coords().data();

    for (std::size_t t = 1; t <= opts.steps; ++t) {
        stream(y);
        std::size_t best = 0;
        double best_sq = sq_dist(y.data(), pts, d);
        for (std::size_t i = 1; i < n; ++i) {
            const double s = sq_dist(y.data(), pts + i * d, d);
            if (s < best_sq) {
                best_sq = s;
                best = i;
            }
        }
        const double gamma = opts.a / (b + static_cast<double>(t));
        for (std::size_t k = 0; k < d; ++k) pts[best * d + k] += gamma * (y[k] - pts[best * d + k]);
    }

    OptimizerReport report;
    report.iterations = opts.steps;
    Codebook out = opts.steps == 0 ? initial : Codebook(points);
    if (opts.holdout > 0) {
        const NearestSearcher search(out);
        std::vector<double> counts(n, 0.0);
        double total = 0.0;
        for (std::size_t s = 0; s < opts.holdout; ++s) {
            stream(y);
            double sq;
            counts[search.nearest(y, sq)] += 1.0;
            total += sq;
        }
        report.final_distortion = total / static_cast<double>(opts.holdout);
        report.distortion_history.push_back(report.final_distortion);
        if (opts.steps > 0) {
            for (double& c : counts) c /= static_cast<double>(opts.holdout);
            out.set_weights(std::move(counts));
        }
    }
    report.converged = true;
    return {std::move(out), report};
}

double normal_grid_distortion(std::span<const double> x, std::vector<double>* weights) {
    const std::size_t n = x.size();
    if (weights) weights->assign(n, 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double a = i == 0 ? -std::numeric_limits<double>::infinity() : 0.5 * (x[i - 1] + x[i]);
        const double b = i + 1 == n ? std::numeric_limits<double>::infinity() : 0.5 * (x[i] + x[i + 1]);
        const double mass = norm_cdf(b) - norm_cdf(a);
        const double pa = std::isinf(a) ? 0.0 : norm_pdf(a);
        const double pb = std::isinf(b) ? 0.0 : norm_pdf(b);
        const double apa = std::isinf(a) ? 0.0 : a * pa;
        const double bpb = std::isinf(b) ? 0.0 : b * pb;
        // integral of (z - x_i)^2 phi(z) over the cell
        total += x[i] * x[i] * mass - 2.0 * x[i] * (pa - pb) + mass + apa - bpb;
        if (weights) (*weights)[i] = mass;
    }
    return total;
}

NewtonResult newton_optimize_1d_normal(std::size_t n, std::size_t max_iter, double tol) {
    SWING_REQUIRE(n >= 1, "grid size must be positive");
    NewtonResult res;
    if (n == 1) {
        res.codebook = Codebook(PointSet(1, std::vector<double>{0.0}), {1.0});
        res.distortion = 1.0;
        res.converged = true;
        return res;
    }
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> x(n);
    const double spread = 1.0 + std::sqrt(2.0 * std::log(static_cast<double>(n)));
    for (std::size_t i = 0; i < n; ++i)
        x[i] = spread * (2.0 * (static_cast<double>(i) + 0.5) / static_cast<double>(n) - 1.0);

    struct Cells {
        std::vector<double> mass, pa, pb;
    };
    auto cells = [&](const std::vector<double>& p) {
        Cells c{std::vector<double>(n), std::vector<double>(n), std::vector<double>(n)};
        for (std::size_t i = 0; i < n; ++i) {
            const double a = i == 0 ? -inf : 0.5 * (p[i - 1] + p[i]);
            const double b = i + 1 == n ? inf : 0.5 * (p[i] + p[i + 1]);
            c.mass[i] = norm_cdf(b) - norm_cdf(a);
            c.pa[i] = std::isinf(a) ? 0.0 : norm_pdf(a);
            c.pb[i] = std::isinf(b) ? 0.0 : norm_pdf(b);
        }
        return c;
    };
    auto gradient = [&](const std::vector<double>& p, const Cells& c) {
        std::vector<double> g(n);
        for (std::size_t i = 0; i < n; ++i) g[i] = 2.0 * (p[i] * c.mass[i] - (c.pa[i] - c.pb[i]));
        return g;
    };
    auto norm_inf = [](const std::vector<double>& v) {
        double m = 0.0;
        for (double e : v) m = std::max(m, std::abs(e));
        return m;
    };
    auto symmetrize = [&](std::vector<double>& p) {
        for (std::size_t i = 0; i < n / 2; ++i) {
            const double h = 0.5 * (p[n - 1 - i] - p[i]);
            p[i] = -h;
            p[n - 1 - i] = h;
        }
        if (n % 2 == 1) p[n / 2] = 0.0;
    };

    // A few fixed-point sweeps bring the iterate into Newton's basin.
    for (int sweep = 0; sweep < 25; ++sweep) {
        const Cells c = cells(x);
        for (std::size_t i = 0; i < n; ++i)
            if (c.mass[i] > 0.0) x[i] = (c.pa[i] - c.pb[i]) / c.mass[i];
        symmetrize(x);
    }

    Cells c = cells(x);
    std::vector<double> g = gradient(x, c);
    double gnorm = norm_inf(g);
    std::size_t it = 0;
    while (gnorm > tol && it < max_iter) {
        ++it;
        // Tridiagonal Hessian of the distortion.
        std::vector<double> diag(n), off(n > 0 ? n - 1 : 0);
        for (std::size_t i = 0; i < n; ++i) {
            const double right = i + 1 < n ? 0.5 * (x[i + 1] - x[i]) * c.pb[i] : 0.0;
            const double left = i > 0 ? 0.5 * (x[i] - x[i - 1]) * c.pa[i] : 0.0;
            diag[i] = 2.0 * c.mass[i] - right - left;
            if (i + 1 < n) off[i] = -0.5 * (x[i + 1] - x[i]) * c.pb[i];
        }
        // Thomas algorithm for H * step = -g.
        std::vector<double> cp(n), dp(n), step(n);
        cp[0] = n > 1 ? off[0] / diag[0] : 0.0;
        dp[0] = -g[0] / diag[0];
        for (std::size_t i = 1; i < n; ++i) {
            const double denom = diag[i] - off[i - 1] * cp[i - 1];
            cp[i] = i + 1 < n ? off[i] / denom : 0.0;
            dp[i] = (-g[i] - off[i - 1] * dp[i - 1]) / denom;
        }
        step[n - 1] = dp[n - 1];
        for (std::size_t i = n - 1; i-- > 0;) step[i] = dp[i] - cp[i] * step[i + 1];

        double lambda = 1.0;
        bool accepted = false;
        for (int halving = 0; halving < 40; ++halving, lambda *= 0.5) {
            std::vector<double> trial(n);
            for (std::size_t i = 0; i < n; ++i) trial[i] = x[i] + lambda * step[i];
            if (!std::is_sorted(trial.begin(), trial.end()) ||
                std::adjacent_find(trial.begin(), trial.end()) != trial.end())
                continue;
            symmetrize(trial);
            const Cells tc = cells(trial);
            const auto tg = gradient(trial, tc);
            const double tn = norm_inf(tg);
            if (std::isfinite(tn) && tn < gnorm) {
                x = std::move(trial);
                c = tc;
                g = tg;
                gnorm = tn;
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
    }

    std::vector<double> w;
    res.distortion = normal_grid_distortion(x, &w);
    res.codebook = Codebook(PointSet(1, x), w);
    res.iterations = it;
    res.gradient_norm = gnorm;
    res.converged = gnorm <= tol;
    return res;
}

void write_codebook_csv(std::ostream& os, const Codebook& cb) {
    os << cb.dim() << "," << cb.size() << "\n";
    for (std::size_t i = 0; i < cb.size(); ++i) {
        const auto p = cb.point(i);
        for (std::size_t k = 0; k < p.size(); ++k) os << (k ? "," : "") << fmt_double(p[k]);
        os << "\n";
    }
    for (double w : cb.weights()) os << fmt_double(w) << "\n";
}

Codebook read_codebook_csv(std::istream& is) {
    std::string line;
    if (!next_line(is, line)) throw ContractViolation("codebook CSV: missing header");
    const auto header = parse_row(line);
    if (header.size() != 2 || header[0] < 1 || header[1] < 1)
        throw ContractViolation("codebook CSV: header must be 'd,N'");
    const auto d = static_cast<std::size_t>(header[0]);
    const auto n = static_cast<std::size_t>(header[1]);
    PointSet pts(d, 0);
    for (std::size_t i = 0; i < n; ++i) {
        if (!next_line(is, line)) throw ContractViolation("codebook CSV: truncated point rows");
        const auto row = parse_row(line);
        if (row.size() != d) throw ContractViolation("codebook CSV: point row of wrong width");
        pts.push_back(row);
    }
    std::vector<double> w;
    if (next_line(is, line)) {
        w.push_back(parse_row(line).at(0));
        for (std::size_t i = 1; i < n; ++i) {
            if (!next_line(is, line)) throw ContractViolation("codebook CSV: truncated weight rows");
            w.push_back(parse_row(line).at(0));
        }
    }
    return Codebook(std::move(pts), std::move(w));
}

void write_codebook_binary(std::ostream& os, const Codebook& cb) {
    const char magic[4] = {'S', 'W', 'C', 'B'};
    os.write(magic, 4);
    const std::uint64_t d = cb.dim(), n = cb.size();
    const std::uint8_t has_w = cb.has_weights() ? 1 : 0;
    os.write(reinterpret_cast<const char*>(&d), sizeof d);
    os.write(reinterpret_cast<const char*>(&n), sizeof n);
    os.write(reinterpret_cast<const char*>(&has_w), sizeof has_w);
    const auto& coords = cb.points().coords();
    os.write(reinterpret_cast<const char*>(coords.data()), static_cast<std::streamsize>(coords.size() * sizeof(double)));
    if (has_w)
        os.write(reinterpret_cast<const char*>(cb.weights().data()),
                 static_cast<std::streamsize>(cb.weights().size() * sizeof(double)));
}

Codebook read_codebook_binary(std::istream& is) {
    char magic[4];
    std::uint64_t d = 0, n = 0;
    std::uint8_t has_w = 0;
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "SWCB", 4) != 0) throw ContractViolation("codebook binary: bad magic");
    is.read(reinterpret_cast<char*>(&d), sizeof d);
    is.read(reinterpret_cast<char*>(&n), sizeof n);
    is.read(reinterpret_cast<char*>(&has_w), sizeof has_w);
    if (!is || d == 0 || n == 0) throw ContractViolation("codebook binary: bad header");
    std::vector<double> coords(d * n);
    is.read(reinterpret_cast<char*>(coords.data()), static_cast<std::streamsize>(coords.size() * sizeof(double)));
    std::vector<double> w;
    if (has_w) {
        w.resize(n);
        is.read(reinterpret_cast<char*>(w.data()), static_cast<std::streamsize>(n * sizeof(double)));
    }
    if (!is) throw ContractViolation("codebook binary: truncated payload");
    return Codebook(PointSet(d, std::move(coords)), std::move(w));
}

}  // namespace swing
