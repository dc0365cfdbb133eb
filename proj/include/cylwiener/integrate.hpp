#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "cylwiener/radon.hpp"
#include "cylwiener/rkhs.hpp"
#include "cylwiener/simulate.hpp"
#include "cylwiener/space.hpp"
#include "cylwiener/stat.hpp"

namespace cylwiener {

struct IntegrandPiece {
    double t_start = 0.0;
    double t_end = 0.0;
    Eigen::MatrixXd matrix;  // dimV x dimU
};

// Deterministic piecewise-constant operator-valued integrand. Pieces must
// chain contiguously from 0 to the horizon and sit on grid boundaries, so
// the discrete integral has no time-discretization error.
class Integrand {
public:
    explicit Integrand(std::vector<IntegrandPiece> pieces);
    static Integrand constant(Eigen::MatrixXd matrix, const TimeGrid& grid);

    int dim_u() const { return dim_u_; }
    int dim_v() const { return dim_v_; }
    const std::vector<IntegrandPiece>& pieces() const { return pieces_; }

    // Piece index for every grid step; throws on boundary misalignment.
    std::vector<int> step_pieces(const TimeGrid& grid) const;

private:
    std::vector<IntegrandPiece> pieces_;
    int dim_u_ = 0;
    int dim_v_ = 0;
};

struct IntegralSamples {
    long n_paths = 0;
    int n_functionals = 0;
    int steps = 0;
    bool has_running = false;
    std::vector<double> finals;   // [p * n_functionals + i]
    std::vector<double> running;  // [(p * n_functionals + i) * (steps + 1) + j]

    double final_value(long p, int i) const {
        return finals[static_cast<std::size_t>(p * n_functionals + i)];
    }
    double running_value(long p, int i, int j) const {
        return running[static_cast<std::size_t>((p * n_functionals + i) * (steps + 1) + j)];
    }
};

// I_t(phi)v* = sum_k sum_j <phi(t_j) (embed col k), v*> (B_k(t_{j+1}) - B_k(t_j)),
// left-endpoint evaluation. Exact in k (finite rank) and exact in time for
// grid-aligned piecewise-constant integrands.
IntegralSamples ito_integral(const Integrand& phi, const RkhsFactor& rk,
                             const DriverPaths& drivers, const TimeGrid& grid,
                             const std::vector<Functional>& fs, bool keep_running = false);

// Exact second moment of I_T(phi)v*: sum over pieces of
// piece_length * ||embed^T phi^T v*||^2.
double isometry_target(const Integrand& phi, const RkhsFactor& rk, const TimeGrid& grid,
                       const Functional& v);

// Empirical E[I_T^2] against the exact target, one entry per functional.
StatReport isometry_check(const Integrand& phi, const RkhsFactor& rk,
                          const std::vector<Functional>& fs, const IntegralSamples& samples,
                          const TimeGrid& grid, const CheckContext& ctx,
                          const VerdictRule& rule = {});

// Haar-ish random orthogonal matrix: QR of a seeded Gaussian matrix with the
// R-diagonal sign fix, deterministic in (n, seed).
Eigen::MatrixXd random_rotation(int n, std::uint64_t seed);

// Largest |I - I~| over paths and functionals after passing the driver family
// and the factor basis through the rotation R (drivers C = R B, embedding
// columns embed R^T). Exact-zero in exact arithmetic.
double basis_change_diff(const Integrand& phi, const RkhsFactor& rk,
                         const DriverPaths& drivers, const TimeGrid& grid,
                         const std::vector<Functional>& fs, const Eigen::MatrixXd& rotation);

// Runs basis_change_diff for n_rotations seeded rotations; each entry passes
// iff the difference stays below 1e-9 * scale of the integral values.
StatReport basis_independence_check(const Integrand& phi, const RkhsFactor& rk,
                                    const DriverPaths& drivers, const TimeGrid& grid,
                                    const std::vector<Functional>& fs, std::uint64_t seed,
                                    int n_rotations, const CheckContext& ctx);

// E[(I_{t'} - I_t) g(I_t)] = 0 for g in {1, identity, sign} over a ladder of
// quartile time pairs; needs running values.
StatReport martingale_check(const IntegralSamples& samples, const TimeGrid& grid,
                            const CheckContext& ctx, const VerdictRule& rule = {});

// Covariance of the induced distribution of I_T: R = sum over pieces of
// piece_length * (phi embed)(phi embed)^T. Agrees with the isometry target
// through <R v*, v*> to machine precision by construction.
Eigen::MatrixXd induced_covariance(const Integrand& phi, const RkhsFactor& rk,
                                   const TimeGrid& grid);

// Empirical second moments of (I_T v_i*) against <R v_i*, v_j*> entrywise,
// plus mean-zero and marginal-normality entries: the induced distribution is
// the centred Gaussian with covariance R.
StatReport induced_covariance_check(const Integrand& phi, const RkhsFactor& rk,
                                    const std::vector<Functional>& fs,
                                    const IntegralSamples& samples, const TimeGrid& grid,
                                    const CheckContext& ctx, const VerdictRule& rule = {});

// Computes the V-valued integral sum_j phi(t_j) (W(t_{j+1}) - W(t_j)) on
// vector paths and checks that pairing it with each functional reproduces
// ito_integral to machine precision. Refuses families whose cylindrical
// process has no inducing vector-valued one.
StatReport hilbert_agreement_check(const Integrand& phi, const RkhsFactor& rk,
                                   const DriverPaths& drivers, const TimeGrid& grid,
                                   const std::vector<Functional>& fs, RadonState extension,
                                   const CheckContext& ctx);

}  // namespace cylwiener
