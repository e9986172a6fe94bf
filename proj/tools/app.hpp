#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "swing/model.hpp"
#include "swing/tree_pricer.hpp"

namespace swing::app {

struct PricingSection {
    double Q_min = 0.0;
    double Q_max = 0.0;
    double q_min = 0.0;  // local bounds per date
    double q_max = 1.0;
    std::size_t grid_size = 50;
    std::size_t n_samples = 100000;   // transition paths, and grid samples unless overridden
    std::size_t grid_samples = 0;     // 0: same as n_samples
    double grid_tol = 1e-4;
    std::size_t grid_max_iter = 500;
    GridOptimizer optimizer = GridOptimizer::clvq_lloyd;
    std::uint64_t seed = 1;
    std::size_t policy_paths = 10000;  // 0 disables policy valuation
    bool match_forward = true;
};

struct OutputSection {
    std::filesystem::path directory = "swing_out";
    bool cache = true;
};

struct RunConfig {
    TwoFactorParams model;
    PricingSection pricing;
    OutputSection output;
    unsigned threads = 1;
};

/// Parses the JSON configuration; relative file references resolve against
/// `base_dir`. Throws ConfigError on malformed or out-of-range input.
RunConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir = ".");
RunConfig load_config(const std::filesystem::path& path);

struct Seeds {
    std::uint64_t master = 0;
    std::uint64_t grid = 0;
    std::uint64_t transition = 0;
    std::uint64_t policy = 0;
};
Seeds derive_seeds(std::uint64_t master);

struct TreeRun {
    QuantTree tree;
    std::vector<OptimizerReport> grid_reports;
    std::size_t zero_visit_rows = 0;
    double strip_std_err = 0.0;  // MC standard error of the quantized call strip
    double grid_seconds = 0.0;
    double transition_seconds = 0.0;
    bool grids_cached = false;
    bool tree_cached = false;
    std::string grid_key, tree_key;
};

/// Grids only (no transitions); uses and fills the cache when enabled.
TreeRun obtain_grids(const RunConfig& cfg);
/// Full quantized tree; uses and fills the cache when enabled.
TreeRun obtain_tree(const RunConfig& cfg);

/// Exclusive lock on the output directory for the lifetime of the object.
class DirectoryLock {
public:
    explicit DirectoryLock(const std::filesystem::path& dir);
    ~DirectoryLock();
    DirectoryLock(const DirectoryLock&) = delete;
    DirectoryLock& operator=(const DirectoryLock&) = delete;

private:
    std::filesystem::path file_;
};

/// Each command returns the JSON document printed on standard output.
std::string cmd_grids(const RunConfig& cfg);
std::string cmd_transitions(const RunConfig& cfg);
std::string cmd_price(const RunConfig& cfg, std::optional<double> Q_min = {}, std::optional<double> Q_max = {});
std::string cmd_surface(const RunConfig& cfg);
std::string cmd_simulate(const RunConfig& cfg, std::size_t paths);

struct ConvergeRow {
    std::size_t grid_size = 0;
    double price = 0.0;
    double abs_error = 0.0;
    double wall_seconds = 0.0;
    double std_err = 0.0;
};

struct ConvergeResult {
    double oracle = 0.0;
    std::vector<ConvergeRow> rows;
    double slope = 0.0;  // least-squares slope of log error against log grid size
};

/// Surface value at (0, n) for each grid size against the Black strip.
ConvergeResult run_converge(const RunConfig& cfg, const std::vector<std::size_t>& sizes);
void write_converge_csv(std::ostream& os, const ConvergeResult& result);
std::string cmd_converge(const RunConfig& cfg, const std::vector<std::size_t>& sizes);

/// Maps library exceptions to process exit codes.
int exit_code_for(const std::exception& e);

}  // namespace swing::app
