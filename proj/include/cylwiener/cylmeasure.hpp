#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "cylwiener/space.hpp"
#include "cylwiener/stat.hpp"

namespace cylwiener {

// Symmetric positive semi-definite covariance operator on a finite-rank
// coordinate space. Stores either a dense matrix or, for diagonal operators,
// just the eigenvalue sequence (in the canonical basis).
class CovOperator {
public:
    static CovOperator dense(Eigen::MatrixXd q);
    static CovOperator diagonal(Eigen::VectorXd eigenvalues);

    int dim() const { return dim_; }
    bool is_diagonal() const { return diagonal_; }

    // Dense view (materializes the diagonal if needed).
    Eigen::MatrixXd matrix() const;
    const Eigen::VectorXd& diagonal_values() const;

    // Q applied to a functional's coefficient vector.
    Eigen::VectorXd apply(const Eigen::VectorXd& u) const;

    // Bilinear form <Q u, v>.
    double pairing(const Functional& u, const Functional& v) const;

private:
    CovOperator() = default;
    int dim_ = 0;
    bool diagonal_ = false;
    Eigen::MatrixXd q_;      // dense storage (empty when diagonal_)
    Eigen::VectorXd diag_;   // eigenvalues (empty when dense)
};

// Centred Gaussian cylindrical measure determined by a covariance operator.
struct GaussCylMeasure {
    SpaceSpec space;
    CovOperator cov;

    GaussCylMeasure(SpaceSpec sp, CovOperator q);
};

// Characteristic function at a single functional: exp(-0.5 <Q u, u>).
// Normalized as a probability measure, so char_function(mu, 0) == 1.
std::complex<double> char_function(const GaussCylMeasure& mu, const Functional& u);

// Gram matrix of the finite-dimensional image measure under (u_1,...,u_n):
// G_ij = <Q u_i, u_j>. The image of mu under the map x -> (<x,u_i>)_i is
// N(0, G).
Eigen::MatrixXd image_covariance(const GaussCylMeasure& mu,
                                 const std::vector<Functional>& functionals);

// Probability of a cylinder set. One functional: exact via the normal CDF.
// Several functionals: Monte Carlo over the image Gaussian (handles singular
// Gram matrices through an eigenvalue factor).
double cylinder_probability(const GaussCylMeasure& mu, const CylinderSet& set,
                            const MCConfig& mc);

// Compares the empirical characteristic function of coordinate samples
// against exp(-0.5 <Q u, u>) for each supplied functional. `samples` holds
// n_samples rows of dim columns. Tolerance per functional:
// multiplier / sqrt(n) + bias.
StatReport empirical_char_check(const GaussCylMeasure& mu,
                                const Eigen::MatrixXd& samples,
                                const std::vector<Functional>& functionals,
                                const CheckContext& ctx,
                                double multiplier = 4.0, double bias = 1e-3);

}  // namespace cylwiener
