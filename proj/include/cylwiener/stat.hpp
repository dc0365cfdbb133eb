#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace cylwiener {

/// Library-wide pass rule. An estimator check passes when
/// |estimate - target| <= multiplier * se; a distributional test passes
/// when p >= significance. Every verdict in the library is produced by
/// the check_* functions below, so the rule lives in exactly one place.
struct VerdictRule {
    double multiplier = 4.0;
    double significance = 1e-3;
};

struct MCConfig {
    long n_samples = 10000;
    std::uint64_t seed = 0;
    double tolerance_multiplier = 4.0;
    double significance = 1e-3;

    VerdictRule rule() const { return {tolerance_multiplier, significance}; }
    /// Throws ConfigError when n_samples is too small for a verdict.
    void require_samples(long minimum = 100) const;
};

/// Traceability attached to every report entry.
struct CheckContext {
    std::string anchor;       // stable name of the property being verified
    std::uint64_t seed = 0;
    std::string config_hash;  // hex hash of the driving config, "" if none
};

struct ReportEntry {
    std::string name;
    double estimate = 0.0;
    double target = 0.0;
    double se = 0.0;
    bool pass = false;
    CheckContext context;
};

class StatReport {
  public:
    std::vector<ReportEntry> entries;

    bool all_pass() const;
    void append(ReportEntry e) { entries.push_back(std::move(e)); }
    void append(const StatReport& other);

    nlohmann::json to_json() const;
    std::string to_text() const;
};

// Verdict engine. check_exact encodes machine-precision identities in the
// same six-field schema: the deviation is the estimate, the target is 0,
// and se = tol / multiplier so the uniform rule applies unchanged.
ReportEntry check_estimate(std::string name, double estimate, double target, double se,
                           CheckContext ctx, const VerdictRule& rule = {});
ReportEntry check_upper(std::string name, double estimate, double target, double se,
                        CheckContext ctx, const VerdictRule& rule = {});  // one-sided
ReportEntry check_pvalue(std::string name, double p, CheckContext ctx,
                         const VerdictRule& rule = {});
ReportEntry check_exact(std::string name, double deviation, double tol, CheckContext ctx,
                        const VerdictRule& rule = {});

struct MeanSE {
    double mean = 0.0;
    double se = 0.0;
};

/// Sample mean with standard error s/sqrt(n) (unbiased variance). n >= 2.
MeanSE mean_se(std::span<const double> xs);

/// Unbiased sample variance with moment-based asymptotic standard error
/// sqrt((m4 - m2^2)/n); no normality assumption.
MeanSE variance_se(std::span<const double> xs);

/// Sample covariance (unbiased) with SE from the centred products.
MeanSE covariance_se(std::span<const double> xs, std::span<const double> ys);

struct NormalityStat {
    double skew_z = 0.0;  // standardized third-moment statistic
    double kurt_z = 0.0;  // standardized fourth-moment statistic
    double k2 = 0.0;      // skew_z^2 + kurt_z^2, asymptotically chi-square(2)
    double p = 1.0;
    bool degenerate = false;  // zero-variance input
};

/// Moment-based normality test (standardized skewness and excess
/// kurtosis, combined chi-square(2) statistic). Requires n >= 1000.
NormalityStat normality_stat(std::span<const double> xs);

struct CorrStat {
    double r = 0.0;
    double z = 0.0;  // Fisher z = atanh(r) * sqrt(n-3)
    double p = 1.0;
    bool degenerate = false;
};

/// Pearson correlation with Fisher-z p-value against r = 0. n >= 1000.
CorrStat corr_test(std::span<const double> xs, std::span<const double> ys);

/// Standard normal CDF.
double normal_cdf(double x);

}  // namespace cylwiener
