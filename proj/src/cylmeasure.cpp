#include "cylwiener/cylmeasure.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "cylwiener/rng.hpp"

namespace cylwiener {

CovOperator CovOperator::dense(Eigen::MatrixXd q) {
    if (q.rows() != q.cols() || q.rows() < 1)
        throw std::invalid_argument("CovOperator: matrix must be square and non-empty");
    const double scale = std::max(1.0, q.cwiseAbs().maxCoeff());
    const double asym = (q - q.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-12 * scale)
        throw std::invalid_argument("CovOperator: matrix is not symmetric");
    q = 0.5 * (q + q.transpose().eval());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(q, Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues().minCoeff();
    const double lmax = std::max(0.0, es.eigenvalues().maxCoeff());
    if (lmin < -1e-10 * std::max(1.0, lmax))
        throw std::invalid_argument("CovOperator: matrix is not positive semi-definite");
    CovOperator c;
    c.dim_ = static_cast<int>(q.rows());
    c.diagonal_ = false;
    c.q_ = std::move(q);
    return c;
}

CovOperator CovOperator::diagonal(Eigen::VectorXd eigenvalues) {
    if (eigenvalues.size() < 1)
        throw std::invalid_argument("CovOperator: eigenvalue list must be non-empty");
    if ((eigenvalues.array() < 0.0).any())
        throw std::invalid_argument("CovOperator: eigenvalues must be non-negative");
    CovOperator c;
    c.dim_ = static_cast<int>(eigenvalues.size());
    c.diagonal_ = true;
    c.diag_ = std::move(eigenvalues);
    return c;
}

Eigen::MatrixXd CovOperator::matrix() const {
    if (diagonal_) return diag_.asDiagonal();
    return q_;
}

const Eigen::VectorXd& CovOperator::diagonal_values() const {
    if (!diagonal_)
        throw std::logic_error("CovOperator: dense operator has no stored eigenvalue list");
    return diag_;
}

Eigen::VectorXd CovOperator::apply(const Eigen::VectorXd& u) const {
    if (u.size() != dim_)
        throw std::invalid_argument("CovOperator: functional dimension mismatch");
    if (diagonal_) return diag_.cwiseProduct(u);
    return q_ * u;
}

double CovOperator::pairing(const Functional& u, const Functional& v) const {
    return apply(u.coeffs).dot(v.coeffs);
}

GaussCylMeasure::GaussCylMeasure(SpaceSpec sp, CovOperator q)
    : space(std::move(sp)), cov(std::move(q)) {
    space.validate();
    if (cov.dim() != space.dim)
        throw std::invalid_argument("GaussCylMeasure: covariance dimension does not match space");
}

std::complex<double> char_function(const GaussCylMeasure& mu, const Functional& u) {
    return std::complex<double>(std::exp(-0.5 * mu.cov.pairing(u, u)), 0.0);
}

Eigen::MatrixXd image_covariance(const GaussCylMeasure& mu,
                                 const std::vector<Functional>& functionals) {
    const auto n = static_cast<Eigen::Index>(functionals.size());
    if (n == 0) throw std::invalid_argument("image_covariance: need at least one functional");
    Eigen::MatrixXd g(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::VectorXd qu = mu.cov.apply(functionals[static_cast<std::size_t>(i)].coeffs);
        for (Eigen::Index j = 0; j < n; ++j)
            g(i, j) = qu.dot(functionals[static_cast<std::size_t>(j)].coeffs);
    }
    g = 0.5 * (g + g.transpose().eval());
    return g;
}

double cylinder_probability(const GaussCylMeasure& mu, const CylinderSet& set,
                            const MCConfig& mc) {
    set.validate();
    const Eigen::MatrixXd g = image_covariance(mu, set.functionals);
    const auto n = g.rows();

    if (n == 1) {
        const double var = g(0, 0);
        const Interval& iv = set.base[0];
        if (var <= 0.0) return iv.contains(0.0) ? 1.0 : 0.0;
        const double sd = std::sqrt(var);
        const double hi = std::isinf(iv.hi) ? 1.0 : normal_cdf(iv.hi / sd);
        const double lo = std::isinf(iv.lo) ? 0.0 : normal_cdf(iv.lo / sd);
        return std::max(0.0, hi - lo);
    }

    mc.require_samples();
    // Factor G = F F^T through its eigendecomposition; tolerates singular G.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
    Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0);
    const Eigen::MatrixXd f = es.eigenvectors() * lam.cwiseSqrt().asDiagonal();

    std::mt19937_64 eng(substream(mc.seed, 0, 0));
    GaussianDraw gauss;
    long hits = 0;
    Eigen::VectorXd z(n), y(n);
    for (long s = 0; s < mc.n_samples; ++s) {
        for (Eigen::Index k = 0; k < n; ++k) z(k) = gauss(eng);
        y.noalias() = f * z;
        bool inside = true;
        for (Eigen::Index k = 0; k < n; ++k) {
            if (!set.base[static_cast<std::size_t>(k)].contains(y(k))) {
                inside = false;
                break;
            }
        }
        if (inside) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(mc.n_samples);
}

StatReport empirical_char_check(const GaussCylMeasure& mu,
                                const Eigen::MatrixXd& samples,
                                const std::vector<Functional>& functionals,
                                const CheckContext& ctx,
                                double multiplier, double bias) {
    if (samples.cols() != mu.space.dim)
        throw std::invalid_argument("empirical_char_check: sample width does not match space");
    const auto n = samples.rows();
    if (n < 2) throw std::invalid_argument("empirical_char_check: need at least 2 samples");

    StatReport rep;
    const double tol = multiplier / std::sqrt(static_cast<double>(n)) + bias;
    VerdictRule rule{multiplier, 0.0};
    int idx = 0;
    for (const auto& u : functionals) {
        const Eigen::VectorXd proj = samples * u.coeffs;
        std::complex<double> acc(0.0, 0.0);
        for (Eigen::Index s = 0; s < n; ++s)
            acc += std::complex<double>(std::cos(proj(s)), std::sin(proj(s)));
        acc /= static_cast<double>(n);
        const std::complex<double> expect = char_function(mu, u);
        const double dev = std::abs(acc - expect);
        rep.entries.push_back(check_exact("char-function[" + std::to_string(idx) + "]", dev,
                                          tol, ctx, rule));
        ++idx;
    }
    return rep;
}

}  // namespace cylwiener
