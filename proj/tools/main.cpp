#include <cstdlib>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "app.hpp"
#include "swing/errors.hpp"

namespace {

struct GlobalFlags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<unsigned> threads;
};

swing::app::RunConfig resolve(const GlobalFlags& g) {
    std::string path = g.config;
    if (path.empty()) {
        if (const char* env = std::getenv("SWING_CONFIG")) path = env;
    }
    if (path.empty()) throw swing::ConfigError("no config given (use --config or SWING_CONFIG)");
    auto cfg = swing::app::load_config(path);
    if (g.seed) cfg.pricing.seed = *g.seed;
    if (g.out) cfg.output.directory = *g.out;
    if (g.threads) {
        if (*g.threads < 1) throw swing::ConfigError("--threads must be at least 1");
        cfg.threads = *g.threads;
    }
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App cli{"Swing option pricing by optimal quantization"};
    cli.require_subcommand(1);
    GlobalFlags g;
    cli.add_option("--config", g.config, "JSON run configuration (default: $SWING_CONFIG)");
    cli.add_option("--seed", g.seed, "Master seed, overrides pricing.seed");
    cli.add_option("--out", g.out, "Output directory, overrides output.directory");
    cli.add_option("--threads", g.threads, "Worker threads");

    auto* grids = cli.add_subcommand("grids", "Optimize the per-date quantization grids");
    auto* transitions = cli.add_subcommand("transitions", "Build the quantized tree (grids and transitions)");
    auto* price = cli.add_subcommand("price", "Price the configured contract");
    std::optional<double> q_min, q_max;
    price->add_option("--Q-min,--qmin", q_min, "Global minimum volume, overrides pricing.Q_min");
    price->add_option("--Q-max,--qmax", q_max, "Global maximum volume, overrides pricing.Q_max");
    auto* surface = cli.add_subcommand("surface", "Premium at every integer global constraint");
    auto* converge = cli.add_subcommand("converge", "Error against the Black strip for several grid sizes");
    std::vector<std::size_t> sizes{10, 50, 100, 200};
    converge->add_option("--sizes", sizes, "Grid sizes")->delimiter(',');
    auto* simulate = cli.add_subcommand("simulate", "Write simulated factor paths as CSV");
    std::size_t paths = 10;
    simulate->add_option("--paths", paths, "Number of paths");

    try {
        cli.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = cli.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        const auto cfg = resolve(g);
        std::string doc;
        if (*grids) doc = swing::app::cmd_grids(cfg);
        else if (*transitions) doc = swing::app::cmd_transitions(cfg);
        else if (*price) doc = swing::app::cmd_price(cfg, q_min, q_max);
        else if (*surface) doc = swing::app::cmd_surface(cfg);
        else if (*converge) doc = swing::app::cmd_converge(cfg, sizes);
        else if (*simulate) doc = swing::app::cmd_simulate(cfg, paths);
        std::cout << doc << '\n';
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return swing::app::exit_code_for(e);
    }
}
