#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cylwiener/cylmeasure.hpp"
#include "cylwiener/space.hpp"
#include "cylwiener/stat.hpp"

namespace cylwiener {

// Diagonal operator family F e_k = sigma_k f_k with sigma_k = sqrt(lambda_k),
// given by a named eigenvalue formula or an explicit list, realized up to a
// truncation level. Named formulas describe the idealized infinite family;
// an explicit list is treated as the observed prefix of an unknown one.
class SpectralFamily {
public:
    enum class Formula { Power, Geometric, Explicit };

    // lambda_k = k^(-alpha), k >= 1. Nonincreasing requires alpha >= 0.
    static SpectralFamily power(double alpha, int truncation);
    // lambda_k = rho^k, k >= 1. Nonincreasing requires rho in [0, 1].
    static SpectralFamily geometric(double rho, int truncation);
    // Arbitrary non-negative list; truncation = list length.
    static SpectralFamily explicit_list(std::vector<double> lambdas);

    Formula formula() const { return formula_; }
    double alpha() const { return alpha_; }
    double rho() const { return rho_; }
    int truncation() const { return truncation_; }

    double lambda(long k) const;  // 1-based index; 0 beyond an explicit list
    double sigma(long k) const;
    double partial_hs_sum(long n) const;  // sum of lambda_1..lambda_n

    // Diagonal covariance operator on the first `truncation` coordinates.
    CovOperator to_cov_operator() const;

private:
    Formula formula_ = Formula::Explicit;
    double alpha_ = 0.0;
    double rho_ = 0.0;
    int truncation_ = 0;
    std::vector<double> list_;
};

enum class RadonState { radonifying, not_radonifying, inconclusive };

std::string to_string(RadonState s);

struct RadonVerdict {
    double hs_sum_partial = 0.0;
    RadonState verdict = RadonState::inconclusive;
    std::string evidence;             // analytic criterion or tail diagnostics
    std::vector<double> tail_ratios;  // trailing lambda_{k+1}/lambda_k values
};

// Exact square-summability verdict. Named formulas are decided in closed
// form; explicit lists get a tail-ratio screen that may return inconclusive.
// Requires a Hilbert target norm; Banach targets are refused and should go
// through mc_partial_sum_check.
RadonVerdict hs_check(const SpectralFamily& fam, const SpaceSpec& space);

struct PartialSumResult {
    StatReport report;            // moment-vs-HS-sum entries (Hilbert, p=2)
    RadonState verdict = RadonState::inconclusive;
    std::vector<double> moments;  // estimated E||S_N||^p per level
    std::vector<double> moment_ses;
    std::vector<double> gaps;     // estimated E||S_{N_{j+1}} - S_{N_j}||^p
    std::vector<double> gap_ses;
};

// Monte Carlo partial-sum diagnostic: estimates m_N = E||S_N||^p_moment for
// S_N = sum_{k<=N} G_k sigma_k f_k at each level, plus the successive
// increments. Verdict "radonifying" (converging) when gaps shrink beyond
// noise, "not_radonifying" (diverging) when m_N grows beyond noise at every
// step, inconclusive otherwise. Under a Hilbert norm with p_moment = 2 the
// report also pins each m_N against the exact partial sum of eigenvalues.
PartialSumResult mc_partial_sum_check(const SpectralFamily& fam, const SpaceSpec& space,
                                      double p_moment, const std::vector<long>& levels,
                                      const MCConfig& mc, const CheckContext& ctx);

// Whether the cylindrical Wiener process with this covariance is induced by a
// genuine vector-valued one: decided by square-summability of the embedding
// spectrum. Analytic for spectral families on Hilbert targets.
RadonVerdict extension_verdict(const SpectralFamily& fam, const SpaceSpec& space);

// Fallback for operators given as matrices (or Banach targets): routes
// through the Monte Carlo diagnostic and flags that a finite-rank snapshot
// cannot determine the idealized tail.
RadonVerdict extension_verdict(const CovOperator& q, const SpaceSpec& space,
                               const MCConfig& mc, const CheckContext& ctx);

}  // namespace cylwiener
