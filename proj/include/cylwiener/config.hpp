#pragma once

#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "cylwiener/cylmeasure.hpp"
#include "cylwiener/integrate.hpp"
#include "cylwiener/radon.hpp"
#include "cylwiener/simulate.hpp"
#include "cylwiener/space.hpp"
#include "cylwiener/stat.hpp"

namespace cylwiener {

struct OutputSpec {
    std::string directory = ".";
    std::vector<std::string> formats = {"json"};  // subset of {json, csv, bin}

    bool wants(const std::string& fmt) const;
};

// One experiment, fully determined by a JSON document: space(s), covariance,
// grid, sampling budget, seed, functionals, optional integrand, named checks,
// and output options. CLI flags override individual fields; the config hash
// always reflects the effective values.
struct ExperimentConfig {
    SpaceSpec space;                        // U
    std::optional<SpaceSpec> target_space;  // V (integration target)
    bool cov_is_spectral = false;
    Eigen::MatrixXd cov_matrix;                  // dense path
    std::optional<SpectralFamily> cov_family;    // spectral path
    TimeGrid grid;
    long paths = 10000;
    std::uint64_t seed = 1;
    std::vector<Functional> functionals;
    std::optional<Integrand> integrand;
    std::vector<std::string> checks;
    std::string expect;  // "radonifying" / "not-radonifying" (check command)
    double p_moment = 2.0;
    std::vector<long> levels;
    std::string fixture = "none";  // or "increment-drift"
    double drift = 0.0;            // fixture magnitude; 0 = one grid dt
    OutputSpec output;
    double tolerance_multiplier = 4.0;
    double significance = 1e-3;
    double eig_tol = 1e-12;
    bool serial = false;
    nlohmann::json raw;  // effective config document (hash input)

    static ExperimentConfig from_json(const nlohmann::json& doc);
    static ExperimentConfig from_file(const std::string& path);

    void override_seed(std::uint64_t s);
    void override_paths(long n);
    void override_out_dir(const std::string& dir);
    void override_serial();

    CovOperator cov_operator() const;
    MCConfig mc() const;
    VerdictRule rule() const { return VerdictRule{tolerance_multiplier, significance}; }
    std::string hash() const;  // FNV-1a over the canonical serialized document
    CheckContext context(const std::string& anchor) const;
    SpaceSpec target() const { return target_space ? *target_space : space; }
};

std::string fnv1a_hex(const std::string& data);

}  // namespace cylwiener
