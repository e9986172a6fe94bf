#include "app.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <fcntl.h>
#include <unistd.h>

#include <nlohmann/json.hpp>

#include "swing/contracts.hpp"
#include "swing/errors.hpp"
#include "swing/rng.hpp"
#include "swing/tree_io.hpp"

namespace swing::app {

using json = nlohmann::ordered_json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

template <class T>
T get_or(const json& obj, const char* key, T fallback) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config field '") + key + "': " + e.what());
    }
}

std::size_t get_count(const json& obj, const char* key, std::size_t fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0)
        throw ConfigError(std::string("config field '") + key + "' must be a non-negative integer");
    return v.get<std::size_t>();
}

std::vector<double> read_curve_file(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open curve file " + path.string());
    std::vector<double> out;
    std::string line;
    while (std::getline(is, line)) {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            const auto first = cell.find_first_not_of(" \t\r");
            if (first == std::string::npos) continue;
            char* end = nullptr;
            const double v = std::strtod(cell.c_str() + first, &end);
            if (end == cell.c_str() + first) throw ConfigError("curve file " + path.string() + ": cannot parse '" + cell + "'");
            out.push_back(v);
        }
    }
    return out;
}

std::vector<double> read_curve(const json& model, const char* key, int n, const std::filesystem::path& base) {
    if (!model.contains(key)) throw ConfigError(std::string("model.") + key + " is required");
    const auto& v = model.at(key);
    std::vector<double> out;
    if (v.is_number()) {
        out.assign(static_cast<std::size_t>(n), v.get<double>());
    } else if (v.is_array()) {
        for (const auto& x : v) {
            if (!x.is_number()) throw ConfigError(std::string("model.") + key + " entries must be numbers");
            out.push_back(x.get<double>());
        }
    } else if (v.is_string()) {
        std::filesystem::path p = v.get<std::string>();
        if (p.is_relative()) p = base / p;
        out = read_curve_file(p);
    } else {
        throw ConfigError(std::string("model.") + key + " must be a number, an array or a CSV path");
    }
    if (out.size() != static_cast<std::size_t>(n))
        throw ConfigError(std::string("model.") + key + " needs " + std::to_string(n) + " values, got " +
                          std::to_string(out.size()));
    return out;
}

std::string fnv1a_hex(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::size_t grid_samples(const PricingSection& p) { return p.grid_samples ? p.grid_samples : p.n_samples; }

json model_json(const TwoFactorParams& m) {
    return json{{"alpha1", m.alpha1}, {"alpha2", m.alpha2}, {"sigma1", m.sigma1}, {"sigma2", m.sigma2},
                {"rho", m.rho},       {"r", m.r},           {"T", m.T},           {"n", m.n},
                {"forward", m.forward}, {"strike", m.strikes}};
}

json grid_key_json(const RunConfig& cfg) {
    const auto& m = cfg.model;
    const auto& p = cfg.pricing;
    return json{{"alpha1", m.alpha1},
                {"alpha2", m.alpha2},
                {"sigma1", m.sigma1},
                {"sigma2", m.sigma2},
                {"rho", m.rho},
                {"T", m.T},
                {"n", m.n},
                {"grid_size", p.grid_size},
                {"grid_samples", grid_samples(p)},
                {"grid_tol", p.grid_tol},
                {"grid_max_iter", p.grid_max_iter},
                {"optimizer", optimizer_name(p.optimizer)},
                {"grid_seed", derive_seeds(p.seed).grid}};
}

json tree_key_json(const RunConfig& cfg) {
    json j = grid_key_json(cfg);
    j["model"] = model_json(cfg.model);
    j["n_samples"] = cfg.pricing.n_samples;
    j["transition_seed"] = derive_seeds(cfg.pricing.seed).transition;
    j["match_forward"] = cfg.pricing.match_forward;
    return j;
}

json reports_json(const std::vector<OptimizerReport>& reports) {
    json arr = json::array();
    for (const auto& r : reports)
        arr.push_back(json{{"iterations", r.iterations},
                           {"distortion", r.final_distortion},
                           {"stationarity_residual", r.stationarity_residual},
                           {"reseeded_cells", r.reseeded_cells},
                           {"converged", r.converged}});
    return arr;
}

std::vector<OptimizerReport> reports_from_json(const json& arr) {
    std::vector<OptimizerReport> out;
    for (const auto& j : arr) {
        OptimizerReport r;
        r.iterations = j.at("iterations").get<std::size_t>();
        r.final_distortion = j.at("distortion").get<double>();
        r.stationarity_residual = j.at("stationarity_residual").get<double>();
        r.reseeded_cells = j.at("reseeded_cells").get<std::size_t>();
        r.converged = j.at("converged").get<bool>();
        out.push_back(r);
    }
    return out;
}

json seeds_json(const Seeds& s) {
    return json{{"master", s.master}, {"grid", s.grid}, {"transition", s.transition}, {"policy", s.policy}};
}

std::filesystem::path cache_dir(const RunConfig& cfg, const std::string& kind, const std::string& key) {
    return cfg.output.directory / "cache" / (kind + "-" + key);
}

/// Writes into a scratch directory and renames it into place.
template <class Fn>
void publish_dir(const std::filesystem::path& target, Fn&& write) {
    auto scratch = target;
    scratch += ".partial";
    std::filesystem::remove_all(scratch);
    write(scratch);
    std::filesystem::remove_all(target);
    std::filesystem::rename(scratch, target);
}

void save_grids(const std::filesystem::path& dir, const std::vector<Codebook>& grids, const json& manifest) {
    std::filesystem::create_directories(dir);
    for (std::size_t k = 0; k < grids.size(); ++k) {
        std::ofstream os(dir / ("grid_" + std::to_string(k) + ".csv"), std::ios::binary);
        write_codebook_csv(os, grids[k]);
        if (!os) throw Error("cannot write grid files under " + dir.string());
    }
    std::ofstream os(dir / "manifest.json", std::ios::binary);
    os << manifest.dump(2) << '\n';
}

std::vector<Codebook> load_grids(const std::filesystem::path& dir, std::size_t n) {
    std::vector<Codebook> grids;
    for (std::size_t k = 0; k < n; ++k) {
        std::ifstream is(dir / ("grid_" + std::to_string(k) + ".csv"), std::ios::binary);
        if (!is) throw Error("cache entry " + dir.string() + " is incomplete");
        grids.push_back(read_codebook_csv(is));
    }
    return grids;
}

json read_json_file(const std::filesystem::path& p) {
    std::ifstream is(p, std::ios::binary);
    if (!is) throw Error("cannot read " + p.string());
    return json::parse(is);
}

GlobalConstraints normalized_constraints(const RunConfig& cfg, double Q_min, double Q_max, NormalizedContract& nc) {
    RawContract raw;
    raw.n = cfg.model.n;
    raw.q_min = cfg.pricing.q_min;
    raw.q_max = cfg.pricing.q_max;
    raw.Q_min = Q_min;
    raw.Q_max = Q_max;
    raw.rate = cfg.model.r;
    raw.strikes = cfg.model.strikes;
    nc = normalize_contract(raw);
    return nc.constraints;
}

bool is_integer_pair(GlobalConstraints q, IntConstraints& out) {
    const double lo = std::round(q.lo), hi = std::round(q.hi);
    if (std::abs(q.lo - lo) > kConstraintTol || std::abs(q.hi - hi) > kConstraintTol) return false;
    out = {static_cast<int>(lo), static_cast<int>(hi)};
    return true;
}

}  // namespace

Seeds derive_seeds(std::uint64_t master) {
    return {master, stream_seed(master, 1), stream_seed(master, 2), stream_seed(master, 3)};
}

RunConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!root.is_object()) throw ConfigError("config must be a JSON object");
    for (const auto& [key, _] : root.items())
        if (key != "model" && key != "pricing" && key != "output" && key != "threads")
            throw ConfigError("unknown config section '" + key + "'");
    RunConfig cfg;
    const json model = root.value("model", json::object());
    const json pricing = root.value("pricing", json::object());
    const json output = root.value("output", json::object());

    auto& m = cfg.model;
    m.alpha1 = get_or(model, "alpha1", m.alpha1);
    m.alpha2 = get_or(model, "alpha2", m.alpha2);
    m.sigma1 = get_or(model, "sigma1", m.sigma1);
    m.sigma2 = get_or(model, "sigma2", m.sigma2);
    m.rho = get_or(model, "rho", m.rho);
    m.r = get_or(model, "r", m.r);
    m.T = get_or(model, "T", m.T);
    m.n = get_or(model, "n", m.n);
    if (m.n < 1 || m.n > 10000) throw ConfigError("model.n must lie in [1, 10000]");
    m.forward = read_curve(model, "forward", m.n, base_dir);
    m.strikes = read_curve(model, "strike", m.n, base_dir);
    try {
        m.validate();
    } catch (const ContractViolation& e) {
        throw ConfigError(std::string("model: ") + e.what());
    }
    for (double k : m.strikes)
        if (k < 0.0) throw ConfigError("model.strike must be non-negative");

    auto& p = cfg.pricing;
    p.q_min = get_or(pricing, "q_min", p.q_min);
    p.q_max = get_or(pricing, "q_max", p.q_max);
    p.Q_min = get_or(pricing, "Q_min", 0.0);
    p.Q_max = get_or(pricing, "Q_max", static_cast<double>(m.n) * p.q_max);
    p.grid_size = get_count(pricing, "grid_size", p.grid_size);
    p.n_samples = get_count(pricing, "n_samples", p.n_samples);
    p.grid_samples = get_count(pricing, "grid_samples", p.grid_samples);
    p.grid_tol = get_or(pricing, "grid_tol", p.grid_tol);
    p.grid_max_iter = get_count(pricing, "grid_max_iter", p.grid_max_iter);
    p.seed = get_or<std::uint64_t>(pricing, "seed", p.seed);
    p.policy_paths = get_count(pricing, "policy_paths", p.policy_paths);
    p.match_forward = get_or(pricing, "match_forward", p.match_forward);
    if (pricing.contains("optimizer")) {
        try {
            p.optimizer = parse_optimizer(get_or<std::string>(pricing, "optimizer", "clvq+lloyd"));
        } catch (const ContractViolation& e) {
            throw ConfigError(std::string("pricing.optimizer: ") + e.what());
        }
    }
    if (p.grid_size < 1) throw ConfigError("pricing.grid_size must be at least 1");
    if (p.n_samples < 1) throw ConfigError("pricing.n_samples must be at least 1");
    if (grid_samples(p) < 10 * p.grid_size) throw ConfigError("grid optimization needs at least 10 samples per grid point");
    if (!(p.grid_tol >= 0.0)) throw ConfigError("pricing.grid_tol must be non-negative");
    if (p.grid_max_iter < 1) throw ConfigError("pricing.grid_max_iter must be at least 1");
    if (!(p.q_min >= 0.0 && p.q_min <= p.q_max)) throw ConfigError("pricing local bounds need 0 <= q_min <= q_max");
    if (!(p.Q_min >= 0.0 && p.Q_min <= p.Q_max)) throw ConfigError("pricing global bounds need 0 <= Q_min <= Q_max");

    cfg.output.directory = get_or<std::string>(output, "directory", cfg.output.directory.string());
    cfg.output.cache = get_or(output, "cache", cfg.output.cache);
    const long long threads = get_or<long long>(root, "threads", 1);
    if (threads < 1 || threads > 1024) throw ConfigError("threads must lie in [1, 1024]");
    cfg.threads = static_cast<unsigned>(threads);
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file " + path.string());
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_config(ss.str(), path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
}

DirectoryLock::DirectoryLock(const std::filesystem::path& dir) : file_(dir / ".swing.lock") {
    std::filesystem::create_directories(dir);
    const int fd = ::open(file_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd < 0)
        throw ConfigError("output directory " + dir.string() + " is locked by another run (remove " + file_.string() +
                          " if none is active)");
    const std::string pid = std::to_string(::getpid()) + "\n";
    (void)!::write(fd, pid.data(), pid.size());
    ::close(fd);
}

DirectoryLock::~DirectoryLock() {
    std::error_code ec;
    std::filesystem::remove(file_, ec);
}

TreeRun obtain_grids(const RunConfig& cfg) {
    TreeRun run;
    const json key = grid_key_json(cfg);
    run.grid_key = fnv1a_hex(key.dump());
    const auto dir = cache_dir(cfg, "grids", run.grid_key);
    if (cfg.output.cache && std::filesystem::exists(dir / "manifest.json")) {
        const json manifest = read_json_file(dir / "manifest.json");
        if (manifest.at("key") == key) {
            run.tree.grids = load_grids(dir, static_cast<std::size_t>(cfg.model.n));
            run.grid_reports = reports_from_json(manifest.at("reports"));
            run.grids_cached = true;
            return run;
        }
    }
    const auto t0 = Clock::now();
    GridOptions go;
    go.size = cfg.pricing.grid_size;
    go.n_samples = grid_samples(cfg.pricing);
    go.seed = derive_seeds(cfg.pricing.seed).grid;
    go.optimizer = cfg.pricing.optimizer;
    go.max_iter = cfg.pricing.grid_max_iter;
    go.tol = cfg.pricing.grid_tol;
    go.threads = cfg.threads;
    GridBuild gb = build_grids(cfg.model, go);
    run.grid_seconds = seconds_since(t0);
    run.tree.grids = std::move(gb.grids);
    run.grid_reports = std::move(gb.reports);
    if (cfg.output.cache) {
        const json manifest{{"key", key}, {"reports", reports_json(run.grid_reports)}};
        publish_dir(dir, [&](const std::filesystem::path& d) { save_grids(d, run.tree.grids, manifest); });
    }
    return run;
}

TreeRun obtain_tree(const RunConfig& cfg) {
    const json key = tree_key_json(cfg);
    const std::string tree_key = fnv1a_hex(key.dump());
    const auto dir = cache_dir(cfg, "tree", tree_key);
    if (cfg.output.cache && std::filesystem::exists(dir / "manifest.json")) {
        const json manifest = json::parse(load_manifest(dir));
        if (manifest.at("key") == key) {
            TreeRun run;
            run.tree = load_tree(dir);
            run.grid_key = manifest.at("grid_key").get<std::string>();
            run.tree_key = tree_key;
            run.grid_reports = reports_from_json(manifest.at("grid_reports"));
            run.zero_visit_rows = manifest.at("zero_visit_rows").get<std::size_t>();
            run.strip_std_err = manifest.at("strip_std_err").get<double>();
            run.grids_cached = run.tree_cached = true;
            return run;
        }
    }
    TreeRun run = obtain_grids(cfg);
    run.tree_key = tree_key;
    const auto& p = cfg.model;

    // Uncorrected positive parts at the grid points, for the strip's MC error.
    std::vector<std::vector<double>> positive(run.tree.grids.size());
    for (std::size_t k = 0; k < positive.size(); ++k)
        for (std::size_t i = 0; i < run.tree.grids[k].size(); ++i)
            positive[k].push_back(std::max(0.0, structure_payoff(p, static_cast<int>(k), run.tree.grids[k].point(i)).payoff));

    const auto t0 = Clock::now();
    TransitionOptions to;
    to.n_samples = cfg.pricing.n_samples;
    to.seed = derive_seeds(cfg.pricing.seed).transition;
    to.threads = cfg.threads;
    const TransitionEstimate est = estimate_transitions(
        p, run.tree.grids, to, [&](int k, std::size_t i) { return positive[static_cast<std::size_t>(k)][i]; });
    run.transition_seconds = seconds_since(t0);
    run.zero_visit_rows = est.zero_visit_rows;
    run.strip_std_err = est.functional_std_err;
    run.tree = assemble_tree(p, std::move(run.tree.grids), est, cfg.pricing.match_forward);

    if (cfg.output.cache) {
        const json manifest{{"key", key},
                            {"grid_key", run.grid_key},
                            {"model", model_json(p)},
                            {"grid_size", cfg.pricing.grid_size},
                            {"n_samples", cfg.pricing.n_samples},
                            {"grid_samples", grid_samples(cfg.pricing)},
                            {"seeds", seeds_json(derive_seeds(cfg.pricing.seed))},
                            {"transition_scheme", "exact joint simulation, nearest-cell pair counts"},
                            {"zero_visit_rows", run.zero_visit_rows},
                            {"strip_std_err", run.strip_std_err},
                            {"grid_reports", reports_json(run.grid_reports)}};
        publish_dir(dir, [&](const std::filesystem::path& d) { save_tree(run.tree, d, manifest.dump(2)); });
    }
    return run;
}

std::string cmd_grids(const RunConfig& cfg) {
    const DirectoryLock lock(cfg.output.directory);
    const TreeRun run = obtain_grids(cfg);
    const auto out_dir = cfg.output.directory / "grids";
    publish_dir(out_dir, [&](const std::filesystem::path& d) {
        save_grids(d, run.tree.grids, json{{"key", grid_key_json(cfg)}, {"reports", reports_json(run.grid_reports)}});
    });
    json dates = json::array();
    for (std::size_t k = 0; k < run.tree.grids.size(); ++k) {
        const auto& r = run.grid_reports[k];
        dates.push_back(json{{"k", k},
                             {"size", run.tree.grids[k].size()},
                             {"distortion", r.final_distortion},
                             {"iterations", r.iterations},
                             {"converged", k == 0 || r.converged}});
    }
    const json doc{{"command", "grids"},
                   {"grid_size", cfg.pricing.grid_size},
                   {"grid_samples", grid_samples(cfg.pricing)},
                   {"optimizer", optimizer_name(cfg.pricing.optimizer)},
                   {"seeds", seeds_json(derive_seeds(cfg.pricing.seed))},
                   {"directory", out_dir.string()},
                   {"cached", run.grids_cached},
                   {"dates", dates},
                   {"timings", {{"grids", run.grid_seconds}}}};
    return doc.dump(2);
}

std::string cmd_transitions(const RunConfig& cfg) {
    const DirectoryLock lock(cfg.output.directory);
    const TreeRun run = obtain_tree(cfg);
    const auto out_dir = cfg.output.directory / "tree";
    const json manifest{{"model", model_json(cfg.model)},
                        {"grid_size", cfg.pricing.grid_size},
                        {"n_samples", cfg.pricing.n_samples},
                        {"seeds", seeds_json(derive_seeds(cfg.pricing.seed))},
                        {"transition_scheme", "exact joint simulation, nearest-cell pair counts"},
                        {"zero_visit_rows", run.zero_visit_rows}};
    publish_dir(out_dir, [&](const std::filesystem::path& d) { save_tree(run.tree, d, manifest.dump(2)); });
    const json doc{{"command", "transitions"},
                   {"grid_size", cfg.pricing.grid_size},
                   {"n_samples", cfg.pricing.n_samples},
                   {"seeds", seeds_json(derive_seeds(cfg.pricing.seed))},
                   {"directory", out_dir.string()},
                   {"zero_visit_rows", run.zero_visit_rows},
                   {"cached", run.tree_cached},
                   {"timings", {{"grids", run.grid_seconds}, {"transitions", run.transition_seconds}}}};
    return doc.dump(2);
}

std::string cmd_price(const RunConfig& cfg, std::optional<double> Q_min, std::optional<double> Q_max) {
    const double qmin = Q_min.value_or(cfg.pricing.Q_min);
    const double qmax = Q_max.value_or(cfg.pricing.Q_max);
    if (!(qmin >= 0.0 && qmin <= qmax)) throw ConfigError("global bounds need 0 <= Q_min <= Q_max");
    NormalizedContract nc;
    const GlobalConstraints q = normalized_constraints(cfg, qmin, qmax, nc);
    const double swap = swap_value(cfg.model);

    const DirectoryLock lock(cfg.output.directory);
    const TreeRun run = obtain_tree(cfg);
    const Seeds seeds = derive_seeds(cfg.pricing.seed);

    auto t0 = Clock::now();
    double premium = 0.0;
    json mc = nullptr, se = nullptr;
    IntConstraints qi;
    double policy_seconds = 0.0, dp_seconds = 0.0;
    if (nc.pure_swap) {
        premium = 0.0;
    } else if (is_integer_pair(q, qi)) {
        const DPResult dp = quantized_dp_price(run.tree, qi, cfg.threads);
        premium = dp.price;
        dp_seconds = seconds_since(t0);
        if (cfg.pricing.policy_paths > 0) {
            t0 = Clock::now();
            const PolicyValuation pv = extract_and_value_policy(run.tree, dp.table, qi, cfg.model,
                                                                cfg.pricing.policy_paths, seeds.policy, cfg.threads);
            policy_seconds = seconds_since(t0);
            mc = nc.swap_weight * swap + nc.swing_weight * pv.mc_value;
            se = nc.swing_weight * pv.std_err;
        }
    } else {
        const PremiumSurface surface = premium_surface(run.tree, cfg.threads);
        premium = price_from_surface(surface, q);
        dp_seconds = seconds_since(t0);
    }
    const double price = nc.swap_weight * swap + nc.swing_weight * premium;

    const json doc{{"command", "price"},
                   {"Q_min", qmin},
                   {"Q_max", qmax},
                   {"normalized", {{"Q_min", q.lo}, {"Q_max", q.hi}}},
                   {"price", price},
                   {"swing_premium", premium},
                   {"swap_part", nc.swap_weight * swap},
                   {"mc_policy_value", mc},
                   {"std_err", se},
                   {"grid_size", cfg.pricing.grid_size},
                   {"n_samples", cfg.pricing.n_samples},
                   {"policy_paths", cfg.pricing.policy_paths},
                   {"seeds", seeds_json(seeds)},
                   {"closed_form_strip", closed_form_strip(cfg.model)},
                   {"zero_visit_rows", run.zero_visit_rows},
                   {"cached", run.tree_cached},
                   {"timings",
                    {{"grids", run.grid_seconds},
                     {"transitions", run.transition_seconds},
                     {"dp", dp_seconds},
                     {"policy", policy_seconds}}}};
    return doc.dump(2);
}

std::string cmd_surface(const RunConfig& cfg) {
    const DirectoryLock lock(cfg.output.directory);
    const TreeRun run = obtain_tree(cfg);
    const auto t0 = Clock::now();
    const PremiumSurface surface = premium_surface(run.tree, cfg.threads);
    const double dp_seconds = seconds_since(t0);
    const int n = cfg.model.n;

    const auto csv_path = cfg.output.directory / "surface.csv";
    {
        std::ofstream os(csv_path, std::ios::binary);
        if (!os) throw Error("cannot write " + csv_path.string());
        os << "Q_min,Q_max,price\n";
        for (const auto& v : surface.vertices()) os << v.lo << ',' << v.hi << ',' << fmt(surface.at(v.lo, v.hi)) << '\n';
    }
    const json sidecar{{"columns", {"Q_min", "Q_max", "price"}},
                       {"units", "normalized swing premium, local bounds [0,1]"},
                       {"n", n},
                       {"rows", triangle_vertex_count(n)},
                       {"grid_size", cfg.pricing.grid_size},
                       {"n_samples", cfg.pricing.n_samples},
                       {"seeds", seeds_json(derive_seeds(cfg.pricing.seed))},
                       {"model", model_json(cfg.model)},
                       {"closed_form_strip", closed_form_strip(cfg.model)},
                       {"swap_value", swap_value(cfg.model)},
                       {"tree_key", run.tree_key}};
    {
        std::ofstream os(cfg.output.directory / "surface.json", std::ios::binary);
        os << sidecar.dump(2) << '\n';
    }
    const json doc{{"command", "surface"},
                   {"csv", csv_path.string()},
                   {"rows", triangle_vertex_count(n)},
                   {"corner_0_n", surface.at(0, n)},
                   {"corner_n_n", surface.at(n, n)},
                   {"cached", run.tree_cached},
                   {"timings", {{"grids", run.grid_seconds}, {"transitions", run.transition_seconds}, {"dp", dp_seconds}}}};
    return doc.dump(2);
}

ConvergeResult run_converge(const RunConfig& cfg, const std::vector<std::size_t>& sizes) {
    if (sizes.empty()) throw ConfigError("converge needs at least one grid size");
    ConvergeResult result;
    result.oracle = closed_form_strip(cfg.model);
    const int n = cfg.model.n;
    for (std::size_t size : sizes) {
        RunConfig c = cfg;
        c.pricing.grid_size = size;
        if (grid_samples(c.pricing) < 10 * size) throw ConfigError("grid size " + std::to_string(size) + " needs more samples");
        const auto t0 = Clock::now();
        const TreeRun run = obtain_tree(c);
        const double price = quantized_dp_price(run.tree, {0, n}, c.threads).price;
        ConvergeRow row;
        row.grid_size = size;
        row.price = price;
        row.abs_error = std::abs(price - result.oracle);
        row.wall_seconds = seconds_since(t0);
        row.std_err = run.strip_std_err;
        result.rows.push_back(row);
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (const auto& r : result.rows) {
        if (!(r.abs_error > 0.0)) continue;
        const double x = std::log(static_cast<double>(r.grid_size)), y = std::log(r.abs_error);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++m;
    }
    const double den = m * sxx - sx * sx;
    result.slope = m >= 2 && den > 0.0 ? (m * sxy - sx * sy) / den : std::numeric_limits<double>::quiet_NaN();
    return result;
}

void write_converge_csv(std::ostream& os, const ConvergeResult& result) {
    os << "grid_size,price,abs_error,wall_seconds,std_err\n";
    for (const auto& r : result.rows)
        os << r.grid_size << ',' << fmt(r.price) << ',' << fmt(r.abs_error) << ',' << fmt(r.wall_seconds) << ','
           << fmt(r.std_err) << '\n';
    os << "# slope=" << (std::isnan(result.slope) ? std::string("nan") : fmt(result.slope)) << '\n';
}

std::string cmd_converge(const RunConfig& cfg, const std::vector<std::size_t>& sizes) {
    const DirectoryLock lock(cfg.output.directory);
    const ConvergeResult result = run_converge(cfg, sizes);
    const auto csv_path = cfg.output.directory / "converge.csv";
    {
        std::ofstream os(csv_path, std::ios::binary);
        if (!os) throw Error("cannot write " + csv_path.string());
        write_converge_csv(os, result);
    }
    json rows = json::array();
    for (const auto& r : result.rows)
        rows.push_back(json{{"grid_size", r.grid_size},
                            {"price", r.price},
                            {"abs_error", r.abs_error},
                            {"std_err", r.std_err},
                            {"wall_seconds", r.wall_seconds}});
    const json doc{{"command", "converge"},
                   {"csv", csv_path.string()},
                   {"oracle", result.oracle},
                   {"slope", std::isnan(result.slope) ? json(nullptr) : json(result.slope)},
                   {"rows", rows}};
    return doc.dump(2);
}

std::string cmd_simulate(const RunConfig& cfg, std::size_t paths) {
    if (paths < 1) throw ConfigError("simulate needs at least one path");
    const DirectoryLock lock(cfg.output.directory);
    const auto& p = cfg.model;
    const auto states = simulate_factor_paths(p, paths, derive_seeds(cfg.pricing.seed).policy, cfg.threads);
    const auto csv_path = cfg.output.directory / "paths.csv";
    std::ofstream os(csv_path, std::ios::binary);
    if (!os) throw Error("cannot write " + csv_path.string());
    os << "path,k,t,x1,x2,spot,payoff\n";
    const std::size_t width = static_cast<std::size_t>(p.n) + 1;
    std::vector<double> mean(static_cast<std::size_t>(p.n), 0.0);
    for (std::size_t path = 0; path < paths; ++path) {
        for (int k = 0; k < p.n; ++k) {
            const FactorState y = states[path * width + static_cast<std::size_t>(k)];
            const SpotPayoff sp = spot_and_payoff(p, k, y);
            mean[static_cast<std::size_t>(k)] += sp.spot / static_cast<double>(paths);
            os << path << ',' << k << ',' << fmt(p.date(k)) << ',' << fmt(y.x1) << ',' << fmt(y.x2) << ','
               << fmt(sp.spot) << ',' << fmt(sp.payoff) << '\n';
        }
    }
    const json doc{{"command", "simulate"},
                   {"csv", csv_path.string()},
                   {"paths", paths},
                   {"seed", derive_seeds(cfg.pricing.seed).policy},
                   {"mean_spot", mean}};
    return doc.dump(2);
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const InfeasibleContract*>(&e)) return 3;
    if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const ContractViolation*>(&e)) return 2;
    if (dynamic_cast<const nlohmann::json::exception*>(&e)) return 2;
    return 4;
}

}  // namespace swing::app
