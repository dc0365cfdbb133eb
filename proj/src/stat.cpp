#include "cylwiener/stat.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "cylwiener/errors.hpp"

namespace cylwiener {

void MCConfig::require_samples(long minimum) const {
    if (n_samples < minimum)
        throw ConfigError("mc.n_samples must be >= " + std::to_string(minimum) +
                          " for a verdict-producing check, got " + std::to_string(n_samples));
}

bool StatReport::all_pass() const {
    for (const auto& e : entries)
        if (!e.pass) return false;
    return true;
}

void StatReport::append(const StatReport& other) {
    entries.insert(entries.end(), other.entries.begin(), other.entries.end());
}

nlohmann::json StatReport::to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& e : entries) {
        arr.push_back({{"name", e.name},
                       {"estimate", e.estimate},
                       {"target", e.target},
                       {"se", e.se},
                       {"verdict", e.pass ? "pass" : "fail"},
                       {"context",
                        {{"anchor", e.context.anchor},
                         {"seed", e.context.seed},
                         {"config_hash", e.context.config_hash}}}});
    }
    return arr;
}

std::string StatReport::to_text() const {
    std::ostringstream os;
    for (const auto& e : entries) {
        os << (e.pass ? "[pass] " : "[FAIL] ") << e.name << ": estimate=" << e.estimate
           << " target=" << e.target << " se=" << e.se << " (" << e.context.anchor << ")\n";
    }
    return os.str();
}

ReportEntry check_estimate(std::string name, double estimate, double target, double se,
                           CheckContext ctx, const VerdictRule& rule) {
    ReportEntry e{std::move(name), estimate, target, se, false, std::move(ctx)};
    e.pass = std::isfinite(estimate) && std::abs(estimate - target) <= rule.multiplier * se;
    return e;
}

ReportEntry check_upper(std::string name, double estimate, double target, double se,
                        CheckContext ctx, const VerdictRule& rule) {
    ReportEntry e{std::move(name), estimate, target, se, false, std::move(ctx)};
    e.pass = std::isfinite(estimate) && estimate <= target + rule.multiplier * se;
    return e;
}

ReportEntry check_pvalue(std::string name, double p, CheckContext ctx, const VerdictRule& rule) {
    ReportEntry e{std::move(name), p, rule.significance, 0.0, false, std::move(ctx)};
    e.pass = std::isfinite(p) && p >= rule.significance;
    return e;
}

ReportEntry check_exact(std::string name, double deviation, double tol, CheckContext ctx,
                        const VerdictRule& rule) {
    return check_estimate(std::move(name), deviation, 0.0, tol / rule.multiplier, std::move(ctx),
                          rule);
}

namespace {

struct Moments {
    long n = 0;
    double mean = 0.0;
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;  // central moments (biased, /n)
};

Moments central_moments(std::span<const double> xs) {
    Moments m;
    m.n = static_cast<long>(xs.size());
    if (m.n == 0) return m;
    double s = 0.0;
    for (double x : xs) s += x;
    m.mean = s / static_cast<double>(m.n);
    double s2 = 0.0, s3 = 0.0, s4 = 0.0;
    for (double x : xs) {
        const double d = x - m.mean;
        const double d2 = d * d;
        s2 += d2;
        s3 += d2 * d;
        s4 += d2 * d2;
    }
    const double n = static_cast<double>(m.n);
    m.m2 = s2 / n;
    m.m3 = s3 / n;
    m.m4 = s4 / n;
    return m;
}

}  // namespace

MeanSE mean_se(std::span<const double> xs) {
    const long n = static_cast<long>(xs.size());
    if (n < 2) throw std::invalid_argument("mean_se: need at least 2 samples");
    const Moments m = central_moments(xs);
    const double var_unbiased = m.m2 * static_cast<double>(n) / static_cast<double>(n - 1);
    return {m.mean, std::sqrt(var_unbiased / static_cast<double>(n))};
}

MeanSE variance_se(std::span<const double> xs) {
    const long n = static_cast<long>(xs.size());
    if (n < 2) throw std::invalid_argument("variance_se: need at least 2 samples");
    const Moments m = central_moments(xs);
    const double nn = static_cast<double>(n);
    const double var_unbiased = m.m2 * nn / (nn - 1.0);
    const double se2 = (m.m4 - m.m2 * m.m2) / nn;
    return {var_unbiased, se2 > 0.0 ? std::sqrt(se2) : 0.0};
}

MeanSE covariance_se(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size())
        throw std::invalid_argument("covariance_se: length mismatch");
    const long n = static_cast<long>(xs.size());
    if (n < 2) throw std::invalid_argument("covariance_se: need at least 2 samples");
    double mx = 0.0, my = 0.0;
    for (long i = 0; i < n; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    std::vector<double> z(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) z[static_cast<std::size_t>(i)] = (xs[i] - mx) * (ys[i] - my);
    MeanSE ms = mean_se(z);
    ms.mean *= static_cast<double>(n) / static_cast<double>(n - 1);
    return ms;
}

NormalityStat normality_stat(std::span<const double> xs) {
    const long n = static_cast<long>(xs.size());
    if (n < 1000) throw std::invalid_argument("normality_stat: need at least 1000 samples");
    const Moments m = central_moments(xs);

    NormalityStat out;
    // Constant input leaves m2 at the rounding floor eps^2 * mean^2; the
    // cutoff sits well above that floor and well below any real variation.
    const double scale = std::max(1.0, m.mean * m.mean);
    if (m.m2 <= 1e-24 * scale) {
        out.degenerate = true;
        out.p = std::numeric_limits<double>::quiet_NaN();
        return out;
    }

    const double nn = static_cast<double>(n);
    const double g1 = m.m3 / std::pow(m.m2, 1.5);
    const double b2 = m.m4 / (m.m2 * m.m2);

    // Standardized skewness (D'Agostino's transformation).
    {
        const double y = g1 * std::sqrt((nn + 1.0) * (nn + 3.0) / (6.0 * (nn - 2.0)));
        const double beta2 = 3.0 * (nn * nn + 27.0 * nn - 70.0) * (nn + 1.0) * (nn + 3.0) /
                             ((nn - 2.0) * (nn + 5.0) * (nn + 7.0) * (nn + 9.0));
        const double w2 = -1.0 + std::sqrt(2.0 * (beta2 - 1.0));
        const double delta = 1.0 / std::sqrt(0.5 * std::log(w2));
        const double alpha = std::sqrt(2.0 / (w2 - 1.0));
        out.skew_z = delta * std::asinh(y / alpha);
    }

    // Standardized excess kurtosis (Anscombe-Glynn transformation).
    {
        const double eb2 = 3.0 * (nn - 1.0) / (nn + 1.0);
        const double vb2 = 24.0 * nn * (nn - 2.0) * (nn - 3.0) /
                           ((nn + 1.0) * (nn + 1.0) * (nn + 3.0) * (nn + 5.0));
        const double x = (b2 - eb2) / std::sqrt(vb2);
        const double sb1 = 6.0 * (nn * nn - 5.0 * nn + 2.0) / ((nn + 7.0) * (nn + 9.0)) *
                           std::sqrt(6.0 * (nn + 3.0) * (nn + 5.0) /
                                     (nn * (nn - 2.0) * (nn - 3.0)));
        const double a =
            6.0 + 8.0 / sb1 * (2.0 / sb1 + std::sqrt(1.0 + 4.0 / (sb1 * sb1)));
        const double t1 = 1.0 - 2.0 / (9.0 * a);
        const double denom = 1.0 + x * std::sqrt(2.0 / (a - 4.0));
        const double t2 = std::cbrt((1.0 - 2.0 / a) / denom);
        out.kurt_z = (t1 - t2) / std::sqrt(2.0 / (9.0 * a));
    }

    out.k2 = out.skew_z * out.skew_z + out.kurt_z * out.kurt_z;
    out.p = std::exp(-0.5 * out.k2);  // chi-square(2) survival function
    return out;
}

CorrStat corr_test(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw std::invalid_argument("corr_test: length mismatch");
    const long n = static_cast<long>(xs.size());
    if (n < 1000) throw std::invalid_argument("corr_test: need at least 1000 samples");

    double mx = 0.0, my = 0.0;
    for (long i = 0; i < n; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (long i = 0; i < n; ++i) {
        const double dx = xs[i] - mx;
        const double dy = ys[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }

    CorrStat out;
    const double floor_x = 1e-24 * static_cast<double>(n) * std::max(1.0, mx * mx);
    const double floor_y = 1e-24 * static_cast<double>(n) * std::max(1.0, my * my);
    if (sxx <= floor_x || syy <= floor_y) {
        out.degenerate = true;
        out.p = std::numeric_limits<double>::quiet_NaN();
        return out;
    }
    out.r = sxy / std::sqrt(sxx * syy);
    const double r = std::clamp(out.r, -1.0, 1.0);
    if (std::abs(r) == 1.0) {
        out.z = std::copysign(std::numeric_limits<double>::infinity(), r);
        out.p = 0.0;
        return out;
    }
    out.z = std::atanh(r) * std::sqrt(static_cast<double>(n) - 3.0);
    out.p = std::erfc(std::abs(out.z) / std::sqrt(2.0));
    return out;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace cylwiener
