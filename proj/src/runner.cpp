#include "cylwiener/runner.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>

#include "cylwiener/errors.hpp"
#include "cylwiener/parallel.hpp"
#include "cylwiener/rng.hpp"

namespace cylwiener {

namespace {

namespace fs = std::filesystem;

void require_checks(const std::vector<std::string>& requested,
                    const std::set<std::string>& allowed) {
    for (const auto& name : requested)
        if (!allowed.count(name)) {
            std::string options;
            for (const auto& a : allowed) options += (options.empty() ? "" : ", ") + a;
            throw ConfigError("config field 'checks': unknown check '" + name +
                              "' (available: " + options + ")");
        }
}

bool wants_check(const std::vector<std::string>& checks, const std::string& name) {
    return std::find(checks.begin(), checks.end(), name) != checks.end();
}

fs::path prepare_out_dir(const ExperimentConfig& cfg) {
    fs::path dir(cfg.output.directory);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec && !fs::is_directory(dir))
        throw ConfigError("cannot create output directory '" + dir.string() + "': " +
                          ec.message());
    return dir;
}

void write_json_file(const fs::path& path, const nlohmann::json& doc) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    out << doc.dump(2) << '\n';
}

nlohmann::json report_doc(const ExperimentConfig& cfg, const std::string& command,
                          const StatReport& rep) {
    nlohmann::json doc;
    doc["command"] = command;
    doc["config_hash"] = cfg.hash();
    doc["seed"] = cfg.seed;
    doc["all_pass"] = rep.all_pass();
    doc["entries"] = rep.to_json();
    return doc;
}

void check_functionals(const ExperimentConfig& cfg, int dim, const char* against) {
    if (cfg.functionals.empty())
        throw ConfigError("config field 'functionals': at least one functional is required");
    for (std::size_t i = 0; i < cfg.functionals.size(); ++i)
        if (cfg.functionals[i].coeffs.size() != dim)
            throw ConfigError("config field 'functionals[" + std::to_string(i) +
                              "]': dimension does not match " + against + " (" +
                              std::to_string(dim) + ")");
}

DriverPaths make_drivers(const ExperimentConfig& cfg, const RkhsFactor& rk) {
    if (rk.rank < 1)
        throw ConfigError(
            "config field 'covariance': operator has rank zero, nothing to simulate");
    DriverPaths drivers = gen_drivers(rk.rank, cfg.grid, cfg.paths, cfg.seed);
    if (cfg.fixture == "increment-drift")
        add_increment_drift(drivers, cfg.drift != 0.0 ? cfg.drift : cfg.grid.dt());
    return drivers;
}

void require_paths(const ExperimentConfig& cfg, long minimum, const std::string& check) {
    if (cfg.paths < minimum)
        throw ConfigError("config field 'paths': check '" + check + "' needs at least " +
                          std::to_string(minimum) + " paths, got " + std::to_string(cfg.paths));
}

}  // namespace

int cmd_simulate(const ExperimentConfig& cfg) {
    set_max_threads(cfg.serial ? 1 : 0);
    std::vector<std::string> checks =
        cfg.checks.empty() ? std::vector<std::string>{"wiener-properties"} : cfg.checks;
    require_checks(checks, {"wiener-properties", "char-function"});

    const CovOperator cov = cfg.cov_operator();
    check_functionals(cfg, cfg.space.dim, "space.dim");
    const RkhsFactor rk = build_rkhs(cov, cfg.eig_tol);
    if (wants_check(checks, "wiener-properties")) require_paths(cfg, 1000, "wiener-properties");
    if (wants_check(checks, "char-function")) require_paths(cfg, 100, "char-function");

    const DriverPaths drivers = make_drivers(cfg, rk);
    const CylPathEval cyl = eval_cyl_wiener(rk, drivers, cfg.functionals);

    StatReport rep;
    if (wants_check(checks, "wiener-properties"))
        rep.append(wiener_property_suite(cyl, cov, cfg.functionals, cfg.grid,
                                         cfg.context("wiener-property-suite"), cfg.rule()));
    if (wants_check(checks, "char-function")) {
        const VecPathEval vec = eval_vec_wiener(rk, drivers);
        Eigen::MatrixXd at_horizon(cfg.paths, cfg.space.dim);
        for (long p = 0; p < cfg.paths; ++p)
            for (int d = 0; d < cfg.space.dim; ++d)
                at_horizon(p, d) = vec.value(p, cfg.grid.steps, d);
        const GaussCylMeasure law(cfg.space,
                                  CovOperator::dense(cfg.grid.horizon * cov.matrix()));
        rep.append(empirical_char_check(law, at_horizon, cfg.functionals,
                                        cfg.context("char-function-scaling"),
                                        cfg.tolerance_multiplier));
    }

    const fs::path dir = prepare_out_dir(cfg);
    if (cfg.output.wants("csv")) {
        std::ofstream out(dir / "paths.csv", std::ios::binary);
        if (!out) throw ConfigError("cannot write paths.csv");
        write_paths_csv(out, cyl, cfg.grid);
    }
    if (cfg.output.wants("bin")) {
        std::ofstream out(dir / "paths.bin", std::ios::binary);
        if (!out) throw ConfigError("cannot write paths.bin");
        write_paths_binary(out, cyl);
    }
    if (cfg.output.wants("json"))
        write_json_file(dir / "simulate_report.json", report_doc(cfg, "simulate", rep));

    std::cout << rep.to_text();
    std::cout << (rep.all_pass() ? "simulate: all checks passed\n"
                                 : "simulate: CHECK FAILURE\n");
    return rep.all_pass() ? 0 : 1;
}

int cmd_integrate(const ExperimentConfig& cfg) {
    set_max_threads(cfg.serial ? 1 : 0);
    std::vector<std::string> checks =
        cfg.checks.empty()
            ? std::vector<std::string>{"ito-isometry", "martingale", "basis-independence",
                                       "induced-covariance", "vector-agreement"}
            : cfg.checks;
    require_checks(checks, {"ito-isometry", "martingale", "basis-independence",
                            "induced-covariance", "vector-agreement"});

    if (!cfg.integrand)
        throw ConfigError("config field 'integrand': required for the integrate command");
    const Integrand& phi = *cfg.integrand;
    const SpaceSpec target = cfg.target();
    if (phi.dim_u() != cfg.space.dim)
        throw ConfigError("config field 'integrand': piece columns (" +
                          std::to_string(phi.dim_u()) + ") must match space.dim (" +
                          std::to_string(cfg.space.dim) + ")");
    if (phi.dim_v() != target.dim)
        throw ConfigError("config field 'integrand': piece rows (" +
                          std::to_string(phi.dim_v()) + ") must match the target dimension (" +
                          std::to_string(target.dim) + ")");
    check_functionals(cfg, target.dim, "the target dimension");
    for (const char* name : {"ito-isometry", "martingale", "induced-covariance"})
        if (wants_check(checks, name)) require_paths(cfg, 1000, name);

    const CovOperator cov = cfg.cov_operator();
    const RkhsFactor rk = build_rkhs(cov, cfg.eig_tol);
    const DriverPaths drivers = make_drivers(cfg, rk);
    const bool keep_running = wants_check(checks, "martingale");
    const IntegralSamples samples =
        ito_integral(phi, rk, drivers, cfg.grid, cfg.functionals, keep_running);

    StatReport rep;
    if (wants_check(checks, "ito-isometry"))
        rep.append(isometry_check(phi, rk, cfg.functionals, samples, cfg.grid,
                                  cfg.context("ito-isometry"), cfg.rule()));
    if (wants_check(checks, "martingale"))
        rep.append(martingale_check(samples, cfg.grid, cfg.context("martingale-increments"),
                                    cfg.rule()));
    if (wants_check(checks, "basis-independence"))
        rep.append(basis_independence_check(phi, rk, drivers, cfg.grid, cfg.functionals,
                                            splitmix64(cfg.seed ^ 0xb0515ULL), 3,
                                            cfg.context("basis-independence")));
    if (wants_check(checks, "induced-covariance"))
        rep.append(induced_covariance_check(phi, rk, cfg.functionals, samples, cfg.grid,
                                            cfg.context("induced-gaussian-covariance"),
                                            cfg.rule()));
    if (wants_check(checks, "vector-agreement")) {
        if (!cfg.space.is_hilbert() || !target.is_hilbert())
            throw ConfigError(
                "config field 'checks': vector-agreement needs Hilbert norms (p = 2) on both "
                "spaces");
        const RadonState extension =
            cfg.cov_is_spectral ? extension_verdict(*cfg.cov_family, cfg.space).verdict
                                : RadonState::inconclusive;
        try {
            rep.append(hilbert_agreement_check(phi, rk, drivers, cfg.grid, cfg.functionals,
                                               extension,
                                               cfg.context("vector-integral-agreement")));
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("checks.vector-agreement: ") + e.what());
        }
    }

    const fs::path dir = prepare_out_dir(cfg);
    if (cfg.output.wants("csv")) {
        std::ofstream out(dir / "integrals.csv", std::ios::binary);
        if (!out) throw ConfigError("cannot write integrals.csv");
        out << "path,functional,value\n";
        char buf[32];
        for (long p = 0; p < samples.n_paths; ++p)
            for (int i = 0; i < samples.n_functionals; ++i) {
                std::snprintf(buf, sizeof buf, "%.17g", samples.final_value(p, i));
                out << p << ',' << i << ',' << buf << '\n';
            }
    }
    if (cfg.output.wants("json"))
        write_json_file(dir / "integrate_report.json", report_doc(cfg, "integrate", rep));

    std::cout << rep.to_text();
    std::cout << (rep.all_pass() ? "integrate: all checks passed\n"
                                 : "integrate: CHECK FAILURE\n");
    return rep.all_pass() ? 0 : 1;
}

int cmd_check(const ExperimentConfig& cfg) {
    set_max_threads(cfg.serial ? 1 : 0);
    require_checks(cfg.checks, {"partial-sums"});
    if (!cfg.cov_is_spectral)
        throw ConfigError(
            "config field 'covariance': the check command needs type = \"spectral\"");
    if (cfg.expect.empty())
        throw ConfigError(
            "config field 'expect': required (\"radonifying\" or \"not-radonifying\")");

    const SpectralFamily& fam = *cfg.cov_family;
    StatReport rep;
    RadonVerdict verdict;

    const bool run_mc = wants_check(cfg.checks, "partial-sums") || !cfg.levels.empty();
    if (cfg.space.is_hilbert()) {
        verdict = extension_verdict(fam, cfg.space);
    } else {
        if (cfg.levels.empty())
            throw ConfigError(
                "config field 'levels': required for non-Hilbert norms, where only the "
                "sampled partial-sum diagnostic applies");
        const PartialSumResult ps =
            mc_partial_sum_check(fam, cfg.space, cfg.p_moment, cfg.levels, cfg.mc(),
                                 cfg.context("partial-sum-diagnostic"));
        rep.append(ps.report);
        verdict.hs_sum_partial = fam.partial_hs_sum(fam.truncation());
        verdict.verdict = ps.verdict;
        verdict.evidence =
            "sampled partial-sum diagnostic (no analytic route for p != 2 norms): " +
            to_string(ps.verdict);
    }
    if (run_mc && cfg.space.is_hilbert()) {
        std::vector<long> levels = cfg.levels;
        if (levels.empty()) {
            const long d = cfg.space.dim;
            if (d >= 3) levels = {std::max<long>(1, d / 4), std::max<long>(2, d / 2), d};
        }
        if (!levels.empty()) {
            const PartialSumResult ps =
                mc_partial_sum_check(fam, cfg.space, cfg.p_moment, levels, cfg.mc(),
                                     cfg.context("partial-sum-diagnostic"));
            rep.append(ps.report);
            verdict.evidence += "; sampled partial sums at the configured levels say \"" +
                                to_string(ps.verdict) + "\"";
        }
    }

    nlohmann::json doc = report_doc(cfg, "check", rep);
    doc["verdict"] = to_string(verdict.verdict);
    doc["hs_sum_partial"] = verdict.hs_sum_partial;
    doc["evidence"] = verdict.evidence;
    doc["tail_ratios"] = verdict.tail_ratios;
    doc["expect"] = cfg.expect;

    const fs::path dir = prepare_out_dir(cfg);
    if (cfg.output.wants("json")) write_json_file(dir / "check_report.json", doc);

    std::cout << rep.to_text();
    std::cout << "verdict: " << to_string(verdict.verdict) << " (expected " << cfg.expect
              << ")\n"
              << "evidence: " << verdict.evidence << '\n';

    if (verdict.verdict == RadonState::inconclusive) return 3;
    if (to_string(verdict.verdict) != cfg.expect) return 1;
    return rep.all_pass() ? 0 : 1;
}

}  // namespace cylwiener
