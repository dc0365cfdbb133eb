#include "cylwiener/rkhs.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "cylwiener/rng.hpp"

namespace cylwiener {

namespace {

void fix_sign(Eigen::Ref<Eigen::VectorXd> col) {
    for (Eigen::Index i = 0; i < col.size(); ++i) {
        if (col(i) != 0.0) {
            if (col(i) < 0.0) col = -col;
            return;
        }
    }
}

}  // namespace

RkhsFactor build_rkhs(const CovOperator& q, double eig_tol) {
    if (eig_tol < 0.0 || eig_tol >= 1.0)
        throw std::invalid_argument("build_rkhs: eig_tol must lie in [0, 1)");

    const int dim = q.dim();
    Eigen::VectorXd lam;
    Eigen::MatrixXd vec;

    if (q.is_diagonal()) {
        // Canonical basis already diagonalizes Q; only sorting is needed.
        lam = q.diagonal_values();
        std::vector<int> order(static_cast<std::size_t>(dim));
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&lam](int a, int b) { return lam(a) > lam(b); });
        Eigen::VectorXd sorted(dim);
        vec = Eigen::MatrixXd::Zero(dim, dim);
        for (int k = 0; k < dim; ++k) {
            sorted(k) = lam(order[static_cast<std::size_t>(k)]);
            vec(order[static_cast<std::size_t>(k)], k) = 1.0;
        }
        lam = std::move(sorted);
    } else {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(q.matrix());
        if (es.info() != Eigen::Success)
            throw std::runtime_error("build_rkhs: eigendecomposition failed");
        // Eigen returns increasing order; reverse to decreasing.
        lam = es.eigenvalues().reverse();
        vec = es.eigenvectors().rowwise().reverse();
    }

    const double lmax = lam.size() > 0 ? std::max(0.0, lam(0)) : 0.0;
    const double cutoff = eig_tol * lmax;
    int rank = 0;
    while (rank < dim && lam(rank) > cutoff && lam(rank) > 0.0) ++rank;

    RkhsFactor rk;
    rk.eig_tol = eig_tol;
    rk.rank = rank;
    rk.spectrum = lam.head(rank);
    rk.embed.resize(dim, rank);
    for (int k = 0; k < rank; ++k) {
        Eigen::VectorXd col = vec.col(k);
        fix_sign(col);
        rk.embed.col(k) = std::sqrt(lam(k)) * col;
    }
    return rk;
}

Eigen::VectorXd adjoint_embed(const RkhsFactor& rk, const Eigen::VectorXd& f) {
    if (f.size() != rk.embed.rows())
        throw std::invalid_argument("adjoint_embed: functional dimension mismatch");
    return rk.embed.transpose() * f;
}

StatReport rkhs_property_suite(const CovOperator& q, const RkhsFactor& rk,
                               const CheckContext& ctx, int n_pairs,
                               std::uint64_t pair_seed) {
    StatReport rep;
    const Eigen::MatrixXd qm = q.matrix();
    const double scale = std::max(1.0, qm.cwiseAbs().maxCoeff());
    const VerdictRule rule{4.0, 0.0};

    if (rk.rank == 0) {
        // Zero operator: the factor space is trivial and reconstruction is
        // the only meaningful statement.
        const double dev = qm.cwiseAbs().maxCoeff();
        rep.entries.push_back(
            check_exact("factorization-reconstruction[degenerate]", dev, 1e-10 * scale, ctx, rule));
        return rep;
    }

    // (a) reconstruction
    {
        const double dev = (rk.embed * rk.embed.transpose() - qm).cwiseAbs().maxCoeff();
        rep.entries.push_back(
            check_exact("factorization-reconstruction", dev, 1e-10 * scale, ctx, rule));
    }

    // (b) reproducing identity on random functional pairs
    {
        std::mt19937_64 eng(substream(pair_seed, 0, 0));
        GaussianDraw gauss;
        double worst = 0.0;
        for (int t = 0; t < n_pairs; ++t) {
            Eigen::VectorXd f(qm.rows()), g(qm.rows());
            for (Eigen::Index i = 0; i < f.size(); ++i) f(i) = gauss(eng);
            for (Eigen::Index i = 0; i < g.size(); ++i) g(i) = gauss(eng);
            const double lhs = (qm * f).dot(g);
            const double rhs = adjoint_embed(rk, f).dot(adjoint_embed(rk, g));
            worst = std::max(worst, std::abs(lhs - rhs) /
                                        std::max(1.0, std::abs(lhs)));
        }
        rep.entries.push_back(check_exact("reproducing-identity", worst, 1e-10, ctx, rule));
    }

    // (c) columns orthogonal with squared norms equal to the spectrum
    {
        const Eigen::MatrixXd gram = rk.embed.transpose() * rk.embed;
        const Eigen::MatrixXd want = rk.spectrum.asDiagonal();
        const double dev = (gram - want).cwiseAbs().maxCoeff();
        rep.entries.push_back(
            check_exact("column-orthogonality", dev, 1e-10 * scale, ctx, rule));
    }

    // (d) rank consistent with the cutoff
    {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(qm, Eigen::EigenvaluesOnly);
        const Eigen::VectorXd lam = es.eigenvalues();
        const double lmax = std::max(0.0, lam.maxCoeff());
        int expect = 0;
        for (Eigen::Index i = 0; i < lam.size(); ++i)
            if (lam(i) > rk.eig_tol * lmax && lam(i) > 0.0) ++expect;
        rep.entries.push_back(check_exact(
            "rank-consistency", static_cast<double>(rk.rank - expect), 0.5, ctx, rule));
    }

    return rep;
}

}  // namespace cylwiener
