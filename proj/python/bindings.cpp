#include <cmath>
#include <limits>

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "swing/contracts.hpp"
#include "swing/errors.hpp"
#include "swing/model.hpp"
#include "swing/oracle.hpp"
#include "swing/quantizer.hpp"
#include "swing/tree_pricer.hpp"

namespace py = pybind11;
using namespace swing;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

PointSet to_points(const Array& a) {
    if (a.ndim() == 1) return PointSet(1, std::vector<double>(a.data(), a.data() + a.shape(0)));
    if (a.ndim() != 2) throw ContractViolation("expected a 1-D or 2-D array of points");
    const auto rows = static_cast<std::size_t>(a.shape(0)), cols = static_cast<std::size_t>(a.shape(1));
    return PointSet(cols, std::vector<double>(a.data(), a.data() + rows * cols));
}

Array to_array(const PointSet& p) {
    Array out({p.size(), p.dim()});
    std::copy(p.coords().begin(), p.coords().end(), out.mutable_data());
    return out;
}

py::array_t<double> to_vector(const std::vector<double>& v) {
    py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

py::tuple codebook_tuple(const Codebook& cb) { return py::make_tuple(to_array(cb.points()), to_vector(cb.weights())); }

Array surface_array(const PremiumSurface& s) {
    const int n = s.horizon();
    Array out({n + 1, n + 1});
    auto* d = out.mutable_data();
    std::fill(d, d + (n + 1) * (n + 1), std::numeric_limits<double>::quiet_NaN());
    for (const auto& v : s.vertices())
        if (auto x = s.find(v.lo, v.hi)) d[v.lo * (n + 1) + v.hi] = *x;
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Swing option pricing by optimal quantization";

    auto base = py::register_exception<Error>(m, "SwingError", PyExc_RuntimeError);
    py::register_exception<ContractViolation>(m, "ContractViolation", PyExc_ValueError);
    py::register_exception<InfeasibleContract>(m, "InfeasibleContract", base.ptr());
    py::register_exception<InstanceTooLarge>(m, "InstanceTooLarge", base.ptr());
    py::register_exception<NumericalFailure>(m, "NumericalFailure", base.ptr());

    py::class_<GlobalConstraints>(m, "GlobalConstraints")
        .def(py::init<double, double>(), py::arg("lo"), py::arg("hi"))
        .def_readwrite("lo", &GlobalConstraints::lo)
        .def_readwrite("hi", &GlobalConstraints::hi)
        .def("__repr__", [](const GlobalConstraints& q) {
            return "GlobalConstraints(" + std::to_string(q.lo) + ", " + std::to_string(q.hi) + ")";
        });

    m.def(
        "locate_tile",
        [](double lo, double hi, int n) {
            const Tile t = locate_tile({lo, hi}, n);
            return py::make_tuple(t.i, t.j, t.orientation == Orientation::upper ? "upper" : "lower");
        },
        py::arg("lo"), py::arg("hi"), py::arg("n"), "Tile (i, j, 'upper'|'lower') containing (lo, hi).");
    m.def(
        "reachable_set",
        [](int lo, int hi, int k, int n) {
            std::vector<std::pair<int, int>> out;
            for (const auto& q : reachable_set({lo, hi}, k, n)) out.emplace_back(q.lo, q.hi);
            return out;
        },
        py::arg("lo"), py::arg("hi"), py::arg("k"), py::arg("n"));

    py::class_<PremiumSurface>(m, "PremiumSurface")
        .def_property_readonly("n", &PremiumSurface::horizon)
        .def("at", &PremiumSurface::at, py::arg("lo"), py::arg("hi"))
        .def("as_array", &surface_array, "(n+1) x (n+1) array indexed [lo, hi], NaN outside T+(n).");
    m.def(
        "interpolate_on_tile", [](const PremiumSurface& s, double lo, double hi) { return interpolate_on_tile(s, {lo, hi}); },
        py::arg("surface"), py::arg("lo"), py::arg("hi"));

    m.def(
        "price_two_period",
        [](double v0, const std::vector<std::pair<double, double>>& v1, double lo, double hi) {
            TwoPeriodInstance inst{v0, {}};
            for (const auto& [v, p] : v1) inst.v1.push_back({v, p});
            const auto r = price_two_period(inst, {lo, hi});
            return py::make_tuple(r.price, r.q0_star);
        },
        py::arg("v0"), py::arg("v1"), py::arg("lo"), py::arg("hi"),
        "Two-date price and optimal first purchase; v1 is a list of (value, probability).");
    m.def(
        "price_lattice_dp", [](const std::string& j, int lo, int hi) { return price_lattice_dp(lattice_from_json(j), {lo, hi}); },
        py::arg("lattice_json"), py::arg("lo"), py::arg("hi"));
    m.def(
        "price_lattice_bruteforce",
        [](const std::string& j, int lo, int hi) { return price_lattice_bruteforce(lattice_from_json(j), {lo, hi}); },
        py::arg("lattice_json"), py::arg("lo"), py::arg("hi"));
    m.def(
        "lattice_premium_surface", [](const std::string& j) { return lattice_premium_surface(lattice_from_json(j)); },
        py::arg("lattice_json"));

    py::class_<OptimizerReport>(m, "OptimizerReport")
        .def_readonly("iterations", &OptimizerReport::iterations)
        .def_readonly("final_distortion", &OptimizerReport::final_distortion)
        .def_readonly("distortion_history", &OptimizerReport::distortion_history)
        .def_readonly("stationarity_residual", &OptimizerReport::stationarity_residual)
        .def_readonly("converged", &OptimizerReport::converged);

    m.def(
        "newton_optimize_1d_normal",
        [](std::size_t n, std::size_t max_iter, double tol) {
            const auto r = newton_optimize_1d_normal(n, max_iter, tol);
            return py::make_tuple(to_vector(r.codebook.points().coords()), to_vector(r.codebook.weights()),
                                  r.distortion, r.converged);
        },
        py::arg("n"), py::arg("max_iter") = 100, py::arg("tol") = 1e-12,
        "Optimal N(0,1) grid: (points, weights, quadratic distortion, converged).");
    m.def(
        "lloyd_optimize",
        [](const Array& samples, const Array& initial, std::size_t max_iter, double tol, unsigned threads) {
            LloydOptions o{max_iter, tol, threads};
            LloydResult r;
            {
                py::gil_scoped_release release;
                r = lloyd_optimize(to_points(samples), Codebook(to_points(initial)), o);
            }
            auto [pts, w] = codebook_tuple(r.codebook).cast<std::pair<py::object, py::object>>();
            return py::make_tuple(pts, w, r.report);
        },
        py::arg("samples"), py::arg("initial"), py::arg("max_iter") = 500, py::arg("tol") = 1e-6, py::arg("threads") = 1,
        "Lloyd I on an empirical measure: (points, weights, report).");

    py::class_<TwoFactorParams>(m, "TwoFactorParams")
        .def(py::init([](double forward, double strike) { return TwoFactorParams::reference(forward, strike); }),
             py::arg("forward") = 20.0, py::arg("strike") = 20.0)
        .def_readwrite("alpha1", &TwoFactorParams::alpha1)
        .def_readwrite("alpha2", &TwoFactorParams::alpha2)
        .def_readwrite("sigma1", &TwoFactorParams::sigma1)
        .def_readwrite("sigma2", &TwoFactorParams::sigma2)
        .def_readwrite("rho", &TwoFactorParams::rho)
        .def_readwrite("r", &TwoFactorParams::r)
        .def_readwrite("T", &TwoFactorParams::T)
        .def_readwrite("n", &TwoFactorParams::n)
        .def_readwrite("forward", &TwoFactorParams::forward)
        .def_readwrite("strikes", &TwoFactorParams::strikes)
        .def("validate", &TwoFactorParams::validate);

    m.def("variance_lambda", &variance_lambda, py::arg("params"), py::arg("t"));
    m.def("closed_form_strip", &closed_form_strip, py::arg("params"));
    m.def("swap_value", &swap_value, py::arg("params"));
    m.def(
        "simulate_factor_paths",
        [](const TwoFactorParams& p, std::size_t n_paths, std::uint64_t seed, unsigned threads) {
            std::vector<FactorState> s;
            {
                py::gil_scoped_release release;
                s = simulate_factor_paths(p, n_paths, seed, threads);
            }
            const std::size_t w = static_cast<std::size_t>(p.n) + 1;
            py::array_t<double> out({n_paths, w, std::size_t{2}});
            auto* d = out.mutable_data();
            for (std::size_t i = 0; i < s.size(); ++i) {
                d[2 * i] = s[i].x1;
                d[2 * i + 1] = s[i].x2;
            }
            return out;
        },
        py::arg("params"), py::arg("n_paths"), py::arg("seed"), py::arg("threads") = 1,
        "Array of shape (n_paths, n+1, 2) holding (X1, X2) at t_0..t_n.");

    py::class_<QuantTree>(m, "QuantTree")
        .def_property_readonly("n", &QuantTree::horizon)
        .def("grid", [](const QuantTree& t, int k) { return codebook_tuple(t.grids.at(static_cast<std::size_t>(k))); })
        .def("payoffs", [](const QuantTree& t, int k) { return t.payoffs.at(static_cast<std::size_t>(k)); })
        .def("transition", [](const QuantTree& t, int k) {
            const Matrix& mx = t.transitions.at(static_cast<std::size_t>(k));
            py::array_t<double> out({mx.rows(), mx.cols()});
            for (std::size_t i = 0; i < mx.rows(); ++i)
                std::copy(mx.row(i).begin(), mx.row(i).end(), out.mutable_data() + i * mx.cols());
            return out;
        });

    m.def(
        "build_tree",
        [](const TwoFactorParams& p, std::size_t grid_size, std::size_t n_samples, std::uint64_t seed, double grid_tol,
           unsigned threads) {
            py::gil_scoped_release release;
            GridOptions g;
            g.size = grid_size;
            g.n_samples = n_samples;
            g.seed = seed;
            g.tol = grid_tol;
            g.threads = threads;
            auto grids = build_grids(p, g).grids;
            TransitionOptions t;
            t.n_samples = n_samples;
            t.seed = seed + 1;
            t.threads = threads;
            const auto est = estimate_transitions(p, grids, t);
            return assemble_tree(p, std::move(grids), est);
        },
        py::arg("params"), py::arg("grid_size") = 50, py::arg("n_samples") = 100000, py::arg("seed") = 1,
        py::arg("grid_tol") = 1e-4, py::arg("threads") = 1, "Optimized grids, transitions and payoffs.");
    m.def(
        "quantized_dp_price",
        [](const QuantTree& t, int lo, int hi, unsigned threads) { return quantized_dp_price(t, {lo, hi}, threads).price; },
        py::arg("tree"), py::arg("lo"), py::arg("hi"), py::arg("threads") = 1);
    m.def("premium_surface", &premium_surface, py::arg("tree"), py::arg("threads") = 1,
          py::call_guard<py::gil_scoped_release>());
    m.def(
        "value_policy",
        [](const QuantTree& t, const TwoFactorParams& p, int lo, int hi, std::size_t n_paths, std::uint64_t seed,
           unsigned threads) {
            py::gil_scoped_release release;
            const auto dp = quantized_dp_price(t, {lo, hi}, threads);
            const auto v = extract_and_value_policy(t, dp.table, {lo, hi}, p, n_paths, seed, threads);
            py::gil_scoped_acquire acquire;
            return py::dict(py::arg("dp_price") = dp.price, py::arg("mc_value") = v.mc_value,
                            py::arg("std_err") = v.std_err, py::arg("totals") = v.totals,
                            py::arg("bang_bang") = v.bang_bang);
        },
        py::arg("tree"), py::arg("params"), py::arg("lo"), py::arg("hi"), py::arg("n_paths") = 10000,
        py::arg("seed") = 3, py::arg("threads") = 1,
        "DP price and Monte-Carlo value of the extracted bang-bang policy on fresh paths.");
}
