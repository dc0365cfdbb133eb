#include <doctest.h>

#include <cmath>
#include <vector>

#include "cylwiener/errors.hpp"
#include "cylwiener/radon.hpp"
#include "test_util.hpp"

using namespace cylwiener;

namespace {
const CheckContext kCtx{"unit", 0, ""};
constexpr double kPi2Over6 = 1.6449340668482264;
}  // namespace

TEST_SUITE("radon") {

TEST_CASE("named eigenvalue formulas") {
    const auto pw = SpectralFamily::power(2.0, 100);
    CHECK(pw.lambda(1) == doctest::Approx(1.0));
    CHECK(pw.lambda(3) == doctest::Approx(1.0 / 9.0));
    CHECK(pw.sigma(4) == doctest::Approx(0.25));

    const auto geo = SpectralFamily::geometric(0.5, 100);
    CHECK(geo.lambda(1) == doctest::Approx(0.5));
    CHECK(geo.lambda(2) == doctest::Approx(0.25));

    const auto ex = SpectralFamily::explicit_list({3.0, 1.0, 0.5});
    CHECK(ex.lambda(2) == doctest::Approx(1.0));
    CHECK(ex.lambda(7) == doctest::Approx(0.0));  // beyond the list
    CHECK(ex.truncation() == 3);

    CHECK_THROWS_AS(SpectralFamily::power(-0.5, 10), std::invalid_argument);
    CHECK_THROWS_AS(SpectralFamily::geometric(1.5, 10), std::invalid_argument);
    CHECK_THROWS_AS(SpectralFamily::explicit_list({1.0, -1.0}), std::invalid_argument);
    CHECK_THROWS_AS(SpectralFamily::explicit_list({}), std::invalid_argument);
}

TEST_CASE("partial sums are monotone and match closed forms") {
    const auto geo = SpectralFamily::geometric(0.5, 40);
    // sum of 0.5^k for k = 1..40 is 1 - 2^-40
    CHECK(geo.partial_hs_sum(40) == doctest::Approx(1.0).epsilon(1e-11));
    double prev = 0.0;
    for (long n = 1; n <= 40; ++n) {
        const double s = geo.partial_hs_sum(n);
        CHECK(s >= prev);
        prev = s;
    }
}

TEST_CASE("square-sum verdicts for named families") {
    const SpaceSpec l2 = SpaceSpec::truncated(100, 2.0);

    auto v = hs_check(SpectralFamily::power(2.0, 10000), l2);
    CHECK(v.verdict == RadonState::radonifying);
    CHECK(std::abs(v.hs_sum_partial - kPi2Over6) < 1e-3);
    CHECK(v.hs_sum_partial < kPi2Over6);  // partial sums approach from below

    v = hs_check(SpectralFamily::power(0.5, 1000), l2);
    CHECK(v.verdict == RadonState::not_radonifying);

    v = hs_check(SpectralFamily::power(1.0, 1000), l2);  // harmonic: diverges
    CHECK(v.verdict == RadonState::not_radonifying);

    v = hs_check(SpectralFamily::geometric(0.5, 50), l2);
    CHECK(v.verdict == RadonState::radonifying);
    CHECK(v.hs_sum_partial == doctest::Approx(1.0).epsilon(1e-12));

    v = hs_check(SpectralFamily::geometric(1.0, 50), l2);
    CHECK(v.verdict == RadonState::not_radonifying);
}

TEST_CASE("square-sum verdicts for explicit lists") {
    const SpaceSpec l2 = SpaceSpec::truncated(100, 2.0);

    // Finite support: conclusive.
    auto v = hs_check(SpectralFamily::explicit_list({2.0, 1.0, 0.0, 0.0}), l2);
    CHECK(v.verdict == RadonState::radonifying);
    CHECK(v.hs_sum_partial == doctest::Approx(3.0));

    // Clear geometric decay: conclusive.
    std::vector<double> geo;
    for (int k = 1; k <= 30; ++k) geo.push_back(std::pow(0.5, k));
    CHECK(hs_check(SpectralFamily::explicit_list(geo), l2).verdict ==
          RadonState::radonifying);

    // Flat tail: terms cannot vanish, conclusive the other way.
    CHECK(hs_check(SpectralFamily::explicit_list(std::vector<double>(25, 1.0)), l2).verdict ==
          RadonState::not_radonifying);

    // Slow polynomial-looking decay: genuinely ambiguous at this depth.
    std::vector<double> slow;
    for (int k = 1; k <= 50; ++k) slow.push_back(1.0 / k);
    v = hs_check(SpectralFamily::explicit_list(slow), l2);
    CHECK(v.verdict == RadonState::inconclusive);
    CHECK_FALSE(v.tail_ratios.empty());
}

TEST_CASE("square-sum check refuses Banach target norms") {
    CHECK_THROWS_AS(hs_check(SpectralFamily::power(2.0, 100), SpaceSpec::truncated(100, 1.0)),
                    std::invalid_argument);
}

TEST_CASE("partial-sum MC diagnostic: summable family converges") {
    const SpaceSpec l2 = SpaceSpec::truncated(1000, 2.0);
    MCConfig mc;
    mc.n_samples = 4000;
    mc.seed = 11;
    const auto fam = SpectralFamily::power(2.0, 1000);
    const auto ps = mc_partial_sum_check(fam, l2, 2.0, {10, 100, 1000}, mc, kCtx);
    CHECK(ps.verdict == RadonState::radonifying);
    CHECK(ps.report.all_pass());  // moments match partial sums (Hilbert identity)
    REQUIRE(ps.moments.size() == 3);
    CHECK(std::abs(ps.moments[2] - fam.partial_hs_sum(1000)) <= 4.0 * ps.moment_ses[2]);
    REQUIRE(ps.gaps.size() == 2);
    CHECK(ps.gaps[1] < ps.gaps[0]);
}

TEST_CASE("partial-sum MC diagnostic: divergent family grows") {
    const SpaceSpec l2 = SpaceSpec::truncated(1000, 2.0);
    MCConfig mc;
    mc.n_samples = 4000;
    mc.seed = 12;
    const auto ps =
        mc_partial_sum_check(SpectralFamily::power(0.5, 1000), l2, 2.0, {10, 100, 1000}, mc, kCtx);
    CHECK(ps.verdict == RadonState::not_radonifying);
    CHECK(ps.moments[2] > ps.moments[1]);
    CHECK(ps.moments[1] > ps.moments[0]);
    CHECK(ps.report.all_pass());  // the moment identity still holds while diverging
}

TEST_CASE("partial-sum MC diagnostic: single-term family has zero gaps") {
    const SpaceSpec l2 = SpaceSpec::truncated(4, 2.0);
    MCConfig mc;
    mc.n_samples = 500;
    mc.seed = 13;
    const auto ps = mc_partial_sum_check(SpectralFamily::explicit_list({1.0, 0.0, 0.0, 0.0}),
                                         l2, 2.0, {1, 2, 4}, mc, kCtx);
    CHECK(ps.verdict == RadonState::radonifying);
    CHECK(ps.gaps[0] == doctest::Approx(0.0));
    CHECK(ps.gaps[1] == doctest::Approx(0.0));
}

TEST_CASE("partial-sum MC diagnostic works under a Banach norm") {
    const SpaceSpec l1 = SpaceSpec::truncated(500, 1.0);
    MCConfig mc;
    mc.n_samples = 2000;
    mc.seed = 14;
    const auto ps = mc_partial_sum_check(SpectralFamily::geometric(0.5, 500), l1, 1.0,
                                         {5, 50, 500}, mc, kCtx);
    CHECK(ps.verdict == RadonState::radonifying);
    CHECK(ps.report.entries.empty());  // no analytic targets outside the Hilbert case
}

TEST_CASE("partial-sum MC diagnostic validates its inputs") {
    const SpaceSpec l2 = SpaceSpec::truncated(100, 2.0);
    const auto fam = SpectralFamily::power(2.0, 100);
    MCConfig mc;
    CHECK_THROWS_AS(mc_partial_sum_check(fam, l2, 2.0, {10, 100}, mc, kCtx), ConfigError);
    CHECK_THROWS_AS(mc_partial_sum_check(fam, l2, 2.0, {10, 10, 100}, mc, kCtx), ConfigError);
    CHECK_THROWS_AS(mc_partial_sum_check(fam, l2, 5.0, {5, 10, 100}, mc, kCtx), ConfigError);
    CHECK_THROWS_AS(mc_partial_sum_check(fam, l2, 2.0, {10, 100, 200}, mc, kCtx), ConfigError);
}

TEST_CASE("extension verdicts mirror square-summability of the spectrum") {
    const SpaceSpec l2 = SpaceSpec::truncated(1000, 2.0);

    auto v = extension_verdict(SpectralFamily::power(2.0, 1000), l2);
    CHECK(v.verdict == RadonState::radonifying);
    CHECK(v.evidence.find("induced") != std::string::npos);

    v = extension_verdict(SpectralFamily::power(1.0, 1000), l2);  // lambda_k = 1/k
    CHECK(v.verdict == RadonState::not_radonifying);

    // lambda_k = 1 for all k: the standard cylindrical case, not induced.
    v = extension_verdict(SpectralFamily::power(0.0, 1000), l2);
    CHECK(v.verdict == RadonState::not_radonifying);
}

TEST_CASE("extension fallback for matrix operators warns and samples") {
    std::mt19937_64 eng(substream(15, 0, 0));
    const Eigen::MatrixXd qm = testutil::random_psd(8, 8, eng);
    MCConfig mc;
    mc.n_samples = 2000;
    mc.seed = 15;

    // Non-diagonal operator: only the sampled diagnostic applies.
    const auto v = extension_verdict(CovOperator::dense(qm), SpaceSpec::truncated(8, 2.0), mc,
                                     kCtx);
    CHECK(v.evidence.find("warning") != std::string::npos);

    // Diagonal + Hilbert goes the exact route.
    Eigen::VectorXd d(4);
    d << 1.0, 0.25, 0.0, 0.0;
    const auto dv = extension_verdict(CovOperator::diagonal(d), SpaceSpec::truncated(4, 2.0),
                                      mc, kCtx);
    CHECK(dv.verdict == RadonState::radonifying);

    // Too small for levels: explicitly inconclusive, not a crash.
    const auto tiny = extension_verdict(CovOperator::dense(testutil::random_psd(2, 2, eng)),
                                        SpaceSpec::truncated(2, 1.0), mc, kCtx);
    CHECK(tiny.verdict == RadonState::inconclusive);
}

}  // TEST_SUITE
