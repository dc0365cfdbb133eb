#include <CLI11.hpp>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "cylwiener/config.hpp"
#include "cylwiener/errors.hpp"
#include "cylwiener/runner.hpp"

namespace {

struct CommonFlags {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<long> paths;
    std::optional<std::string> out_dir;
    bool serial = false;
};

void attach_flags(CLI::App* sub, CommonFlags& flags) {
    sub->add_option("--config", flags.config_path, "experiment config file (JSON)")
        ->required();
    sub->add_option("--seed", flags.seed, "override the config seed");
    sub->add_option("--paths", flags.paths, "override the number of sample paths");
    sub->add_option("--out", flags.out_dir, "override the output directory");
    sub->add_flag("--serial", flags.serial, "single-threaded, bit-exact run");
}

cylwiener::ExperimentConfig load(const CommonFlags& flags) {
    auto cfg = cylwiener::ExperimentConfig::from_file(flags.config_path);
    if (flags.seed) cfg.override_seed(*flags.seed);
    if (flags.paths) cfg.override_paths(*flags.paths);
    if (flags.out_dir) cfg.override_out_dir(*flags.out_dir);
    if (flags.serial) cfg.override_serial();
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "cylwiener: cylindrical Wiener processes on finite-rank spaces — simulation, "
        "stochastic integration, and verification"};
    app.require_subcommand(1);

    CommonFlags sim_flags, int_flags, chk_flags;
    CLI::App* sim =
        app.add_subcommand("simulate", "simulate paths and run the process property suite");
    CLI::App* integ = app.add_subcommand(
        "integrate", "compute stochastic integrals and run the integral property suite");
    CLI::App* chk = app.add_subcommand(
        "check", "square-summability / extension verdict for a spectral covariance");
    attach_flags(sim, sim_flags);
    attach_flags(integ, int_flags);
    attach_flags(chk, chk_flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // usage problems are configuration problems
    }

    try {
        if (sim->parsed()) return cylwiener::cmd_simulate(load(sim_flags));
        if (integ->parsed()) return cylwiener::cmd_integrate(load(int_flags));
        if (chk->parsed()) return cylwiener::cmd_check(load(chk_flags));
    } catch (const cylwiener::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
