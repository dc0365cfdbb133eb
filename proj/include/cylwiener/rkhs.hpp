#pragma once

#include <Eigen/Dense>

#include "cylwiener/cylmeasure.hpp"
#include "cylwiener/stat.hpp"

namespace cylwiener {

// Factorization Q = embed * embed^T of a covariance operator. The columns of
// `embed` are an orthogonal image of the reproducing-kernel space's canonical
// orthonormal basis: column k equals sqrt(lambda_k) * s_k for the spectral
// pairs (lambda_k, s_k) of Q, kept when lambda_k > eig_tol * lambda_max,
// ordered by decreasing eigenvalue, each eigenvector's first nonzero
// coordinate made positive. The adjoint of the embedding sends a functional f
// to embed^T f.
struct RkhsFactor {
    Eigen::MatrixXd embed;     // dim x rank
    Eigen::VectorXd spectrum;  // retained eigenvalues, decreasing
    int rank = 0;
    double eig_tol = 0.0;

    int dim() const { return static_cast<int>(embed.rows()); }
};

RkhsFactor build_rkhs(const CovOperator& q, double eig_tol = 1e-12);

// embed^T f: coordinates of the kernel element h_f in the canonical basis of
// the factor space. Satisfies <Q f, g> = dot(adjoint_embed(f), adjoint_embed(g)).
Eigen::VectorXd adjoint_embed(const RkhsFactor& rk, const Eigen::VectorXd& f);

// Deterministic structural checks on a factorization:
//   (a) reconstruction: embed * embed^T recovers Q,
//   (b) reproducing identity <Q f, g> = <embed^T f, embed^T g> on random pairs,
//   (c) column orthogonality: embed^T embed is diagonal with the spectrum,
//   (d) rank consistency with the eigenvalue cutoff.
// Rank-0 factors (zero operator) produce a single degenerate-pass entry.
StatReport rkhs_property_suite(const CovOperator& q, const RkhsFactor& rk,
                               const CheckContext& ctx, int n_pairs = 16,
                               std::uint64_t pair_seed = 0x51d5u);

}  // namespace cylwiener
