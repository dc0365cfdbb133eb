#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "cylwiener/cylmeasure.hpp"
#include "cylwiener/errors.hpp"
#include "cylwiener/rng.hpp"
#include "test_util.hpp"

using namespace cylwiener;

TEST_SUITE("cylmeasure") {

TEST_CASE("covariance operator validation") {
    Eigen::MatrixXd asym(2, 2);
    asym << 1.0, 0.5, 0.2, 1.0;
    CHECK_THROWS_AS(CovOperator::dense(asym), std::invalid_argument);

    Eigen::MatrixXd indef(2, 2);
    indef << 1.0, 2.0, 2.0, 1.0;  // eigenvalues 3, -1
    CHECK_THROWS_AS(CovOperator::dense(indef), std::invalid_argument);

    Eigen::VectorXd neg(2);
    neg << 1.0, -0.1;
    CHECK_THROWS_AS(CovOperator::diagonal(neg), std::invalid_argument);

    Eigen::MatrixXd ok(2, 2);
    ok << 2.0, 1.0, 1.0, 2.0;
    const CovOperator q = CovOperator::dense(ok);
    CHECK(q.dim() == 2);
    CHECK(q.pairing(Functional{{1.0, 0.0}}, Functional{{0.0, 1.0}}) == doctest::Approx(1.0));
}

TEST_CASE("characteristic function has the Gaussian closed form") {
    const GaussCylMeasure mu(SpaceSpec::finite(2),
                             CovOperator::dense(Eigen::MatrixXd::Identity(2, 2)));
    CHECK(char_function(mu, Functional{{1.0, 0.0}}).real() ==
          doctest::Approx(std::exp(-0.5)));
    CHECK(char_function(mu, Functional{{0.0, 0.0}}).real() == doctest::Approx(1.0));
    CHECK(char_function(mu, Functional{{3.0, 4.0}}).real() ==
          doctest::Approx(std::exp(-12.5)));
    CHECK(char_function(mu, Functional{{1.0, 0.0}}).imag() == doctest::Approx(0.0));
}

TEST_CASE("image covariance is the Gram matrix of the functionals") {
    Eigen::MatrixXd qm(2, 2);
    qm << 2.0, 1.0, 1.0, 2.0;
    const GaussCylMeasure mu(SpaceSpec::finite(2), CovOperator::dense(qm));
    const auto g = image_covariance(mu, {Functional{{1.0, 0.0}}, Functional{{0.0, 1.0}}});
    CHECK(g(0, 0) == doctest::Approx(2.0));
    CHECK(g(0, 1) == doctest::Approx(1.0));
    CHECK(g(1, 0) == doctest::Approx(1.0));
    CHECK(g(1, 1) == doctest::Approx(2.0));
}

TEST_CASE("one-functional cylinder probability is exact") {
    Eigen::VectorXd d(1);
    d << 4.0;  // sd = 2
    const GaussCylMeasure mu(SpaceSpec::finite(1), CovOperator::diagonal(d));
    MCConfig mc;

    const CylinderSet sym{{Functional{{1.0}}}, {Interval{-2.0, 2.0}}};
    // P(|N(0,4)| <= 2) = erf(1/sqrt(2))
    CHECK(cylinder_probability(mu, sym, mc) ==
          doctest::Approx(std::erf(1.0 / std::sqrt(2.0))).epsilon(1e-12));

    const CylinderSet half{{Functional{{1.0}}},
                           {Interval{0.0, std::numeric_limits<double>::infinity()}}};
    CHECK(cylinder_probability(mu, half, mc) == doctest::Approx(0.5).epsilon(1e-12));

    // Degenerate direction: point mass at 0.
    Eigen::VectorXd zero(1);
    zero << 0.0;
    const GaussCylMeasure nu(SpaceSpec::finite(1), CovOperator::diagonal(zero));
    CHECK(cylinder_probability(nu, sym, mc) == doctest::Approx(1.0));
    const CylinderSet away{{Functional{{1.0}}}, {Interval{1.0, 2.0}}};
    CHECK(cylinder_probability(nu, away, mc) == doctest::Approx(0.0));
}

TEST_CASE("multi-functional cylinder probability via Monte Carlo") {
    const GaussCylMeasure mu(SpaceSpec::finite(2),
                             CovOperator::dense(Eigen::MatrixXd::Identity(2, 2)));
    MCConfig mc;
    mc.n_samples = 40000;
    mc.seed = 321;
    const double inf = std::numeric_limits<double>::infinity();

    // Independent coordinates: the positive quadrant has mass 1/4.
    const CylinderSet quadrant{{Functional{{1.0, 0.0}}, Functional{{0.0, 1.0}}},
                               {Interval{0.0, inf}, Interval{0.0, inf}}};
    const double p = cylinder_probability(mu, quadrant, mc);
    const double se = std::sqrt(0.25 * 0.75 / mc.n_samples);
    CHECK(std::abs(p - 0.25) <= 4.0 * se);

    // Comonotone functionals give a singular Gram matrix; the factorization
    // must still work: P(X >= 0 and 2X >= 0) = 1/2.
    const CylinderSet singular{{Functional{{1.0, 0.0}}, Functional{{2.0, 0.0}}},
                               {Interval{0.0, inf}, Interval{0.0, inf}}};
    const double ps = cylinder_probability(mu, singular, mc);
    CHECK(std::abs(ps - 0.5) <= 4.0 * std::sqrt(0.25 / mc.n_samples));

    MCConfig tiny;
    tiny.n_samples = 10;
    CHECK_THROWS_AS(cylinder_probability(mu, quadrant, tiny), ConfigError);
}

TEST_CASE("empirical characteristic function check against exact samples") {
    std::mt19937_64 eng(substream(77, 0, 0));
    Eigen::MatrixXd qm = testutil::random_psd(3, 3, eng);
    const GaussCylMeasure mu(SpaceSpec::finite(3), CovOperator::dense(qm));

    // Draw exact N(0, Q) samples through a Cholesky-type factor.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(qm);
    const Eigen::MatrixXd f =
        es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
    const long n = 100000;
    Eigen::MatrixXd samples(n, 3);
    GaussianDraw gauss;
    Eigen::VectorXd z(3);
    for (long i = 0; i < n; ++i) {
        for (int k = 0; k < 3; ++k) z(k) = gauss(eng);
        samples.row(i) = (f * z).transpose();
    }

    std::vector<Functional> fs;
    for (int i = 0; i < 6; ++i) fs.push_back(testutil::random_functional(3, eng));

    const CheckContext ctx{"unit", 77, ""};
    const auto rep = empirical_char_check(mu, samples, fs, ctx);
    CHECK(rep.entries.size() == fs.size());
    CHECK(rep.all_pass());

    // Self-test: a wrong covariance must be detected.
    const GaussCylMeasure wrong(SpaceSpec::finite(3),
                                CovOperator::dense((2.5 * qm).eval()));
    const auto bad = empirical_char_check(wrong, samples, fs, ctx);
    CHECK_FALSE(bad.all_pass());
}

}  // TEST_SUITE
