#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "cylwiener/errors.hpp"
#include "cylwiener/rng.hpp"
#include "cylwiener/stat.hpp"

using namespace cylwiener;

namespace {

std::vector<double> normal_draws(long n, std::uint64_t seed) {
    std::mt19937_64 eng(substream(seed, 0, 0));
    GaussianDraw gauss;
    std::vector<double> xs(static_cast<std::size_t>(n));
    for (auto& x : xs) x = gauss(eng);
    return xs;
}

}  // namespace

TEST_SUITE("stat") {

TEST_CASE("mean_se on tiny hand-checked samples") {
    std::vector<double> ones{1.0, 1.0, 1.0, 1.0};
    auto m = mean_se(ones);
    CHECK(m.mean == doctest::Approx(1.0));
    CHECK(m.se == doctest::Approx(0.0));

    std::vector<double> two{0.0, 2.0};
    m = mean_se(two);
    CHECK(m.mean == doctest::Approx(1.0));
    CHECK(m.se == doctest::Approx(1.0));  // s = sqrt(2), se = s/sqrt(2)

    std::vector<double> one{1.0};
    CHECK_THROWS_AS(mean_se(one), std::invalid_argument);
}

TEST_CASE("mean of 1e5 standard normal draws lands within the MC tolerance") {
    const auto xs = normal_draws(100000, 42);
    const auto m = mean_se(xs);
    CHECK(std::abs(m.mean) < 4.0 / std::sqrt(100000.0));  // 0.0127
    const auto v = variance_se(xs);
    CHECK(std::abs(v.mean - 1.0) <= 4.0 * v.se);
}

TEST_CASE("variance_se matches the closed form on a known sample") {
    std::vector<double> xs{1.0, 2.0, 3.0, 4.0};  // s^2 = 5/3
    const auto v = variance_se(xs);
    CHECK(v.mean == doctest::Approx(5.0 / 3.0));
    // central moments: m2 = 1.25, m4 = 2.5625 -> se = sqrt((m4 - m2^2)/4)
    CHECK(v.se == doctest::Approx(std::sqrt((2.5625 - 1.5625) / 4.0)));
}

TEST_CASE("covariance_se recovers a known linear dependence") {
    const auto xs = normal_draws(50000, 7);
    std::vector<double> ys(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) ys[i] = 0.5 * xs[i];
    const auto c = covariance_se(xs, ys);
    CHECK(std::abs(c.mean - 0.5) <= 4.0 * c.se);
}

TEST_CASE("normality test calibrates on its own generator") {
    const auto xs = normal_draws(100000, 9001);
    const auto ns = normality_stat(xs);
    CHECK_FALSE(ns.degenerate);
    CHECK(ns.p > 1e-3);
}

TEST_CASE("normality test rejects exponential samples (power self-test)") {
    std::mt19937_64 eng(substream(5, 0, 0));
    std::vector<double> xs(100000);
    for (auto& x : xs) x = -std::log(GaussianDraw::uniform(eng) + 1e-300);
    const auto ns = normality_stat(xs);
    CHECK_FALSE(ns.degenerate);
    CHECK(ns.p < 1e-3);
    CHECK(ns.skew_z > 10.0);  // exponential skewness is 2
}

TEST_CASE("normality handles degenerate input without crashing") {
    std::vector<double> xs(2000, 3.14);
    const auto ns = normality_stat(xs);
    CHECK(ns.degenerate);
    std::vector<double> small(10, 0.0);
    CHECK_THROWS_AS(normality_stat(small), std::invalid_argument);
}

TEST_CASE("correlation test endpoints and calibration") {
    const auto xs = normal_draws(100000, 13);
    auto cs = corr_test(xs, xs);
    CHECK(cs.r == doctest::Approx(1.0));
    CHECK(cs.p == doctest::Approx(0.0));

    std::vector<double> neg(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) neg[i] = -xs[i];
    cs = corr_test(xs, neg);
    CHECK(cs.r == doctest::Approx(-1.0));

    const auto ys = normal_draws(100000, 14);
    cs = corr_test(xs, ys);
    CHECK_FALSE(cs.degenerate);
    CHECK(std::abs(cs.r) < 4.0 / std::sqrt(100000.0 - 3.0));
    CHECK(cs.p > 1e-3);

    std::vector<double> konst(xs.size(), 1.0);
    cs = corr_test(xs, konst);
    CHECK(cs.degenerate);
}

TEST_CASE("normal cdf reference points") {
    CHECK(normal_cdf(0.0) == doctest::Approx(0.5));
    CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-9));
    CHECK(normal_cdf(-8.0) < 1e-14);
}

TEST_CASE("verdict engine applies the uniform rule") {
    const CheckContext ctx{"unit", 1, "deadbeef"};
    const VerdictRule rule{4.0, 1e-3};

    CHECK(check_estimate("a", 1.0, 1.0, 0.0, ctx, rule).pass);
    CHECK(check_estimate("b", 1.3, 1.0, 0.1, ctx, rule).pass);        // 3 se
    CHECK_FALSE(check_estimate("c", 1.5, 1.0, 0.1, ctx, rule).pass);  // 5 se
    CHECK_FALSE(check_estimate("nan", std::nan(""), 1.0, 0.1, ctx, rule).pass);

    CHECK(check_upper("d", 1.0, 2.0, 0.1, ctx, rule).pass);
    CHECK(check_upper("e", 2.3, 2.0, 0.1, ctx, rule).pass);
    CHECK_FALSE(check_upper("f", 2.5, 2.0, 0.1, ctx, rule).pass);

    CHECK(check_pvalue("g", 0.5, ctx, rule).pass);
    CHECK_FALSE(check_pvalue("h", 1e-4, ctx, rule).pass);

    CHECK(check_exact("i", 1e-12, 1e-10, ctx, rule).pass);
    CHECK_FALSE(check_exact("j", 1e-9, 1e-10, ctx, rule).pass);
}

TEST_CASE("report serialization carries the six fields") {
    StatReport rep;
    rep.append(check_estimate("x", 1.0, 1.0, 0.1, CheckContext{"anchor-x", 7, "ff"}));
    rep.append(check_estimate("y", 9.0, 1.0, 0.1, CheckContext{"anchor-y", 7, "ff"}));
    CHECK_FALSE(rep.all_pass());

    const auto j = rep.to_json();
    REQUIRE(j.is_array());
    REQUIRE(j.size() == 2);
    for (const char* key : {"name", "estimate", "target", "se", "verdict", "context"})
        CHECK(j[0].contains(key));
    CHECK(j[0]["verdict"] == "pass");
    CHECK(j[1]["verdict"] == "fail");
    CHECK(j[0]["context"]["anchor"] == "anchor-x");
    CHECK(j[0]["context"]["seed"] == 7);
    CHECK(j[0]["context"]["config_hash"] == "ff");

    const std::string text = rep.to_text();
    CHECK(text.find("[pass] x") != std::string::npos);
    CHECK(text.find("[FAIL] y") != std::string::npos);
}

TEST_CASE("mc config guards its sample budget") {
    MCConfig mc;
    mc.n_samples = 50;
    CHECK_THROWS_AS(mc.require_samples(), ConfigError);
    mc.n_samples = 100;
    CHECK_NOTHROW(mc.require_samples());
}

}  // TEST_SUITE
