#pragma once

#include <Eigen/Core>
#include <limits>
#include <vector>

namespace cylwiener {

/// Coordinate model of the state space U (or the target space V).
///
/// Finite-dimensional spaces are exact; infinite-dimensional sequence
/// spaces enter only as truncations, with the truncation level stored as
/// the ambient dimension. Duals share the coordinate system (biorthogonal
/// standard basis), so a functional is just a coefficient vector.
struct SpaceSpec {
    enum class Kind { Finite, TruncatedSequence };

    int dim = 1;
    double p = 2.0;  // norm exponent in [1, inf]; infinity() = sup-norm
    Kind kind = Kind::Finite;

    static SpaceSpec finite(int dim, double p = 2.0);
    static SpaceSpec truncated(int level, double p = 2.0);

    bool is_hilbert() const { return p == 2.0; }
    void validate() const;  // throws ConfigError on bad dim/p
};

/// An element of the dual space in coordinates: u* = sum_i coeffs[i] e_i*.
struct Functional {
    Eigen::VectorXd coeffs;

    Functional() = default;
    explicit Functional(Eigen::VectorXd c) : coeffs(std::move(c)) {}
    Functional(std::initializer_list<double> c);

    int dim() const { return static_cast<int>(coeffs.size()); }
};

/// Closed interval with infinite endpoints allowed. Open and closed
/// bounds carry the same Gaussian mass (boundaries are null sets), so a
/// single representation covers both.
struct Interval {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();

    bool contains(double x) const { return x >= lo && x <= hi; }
    static Interval all() { return {}; }
};

/// Cylinder set Z(u_1*,...,u_n*, B) with an axis-aligned box base:
/// the set of u with (pair(u,u_1*),...,pair(u,u_n*)) in B.
struct CylinderSet {
    std::vector<Functional> functionals;
    std::vector<Interval> base;  // one interval per functional

    void validate() const;  // throws std::invalid_argument on shape errors
};

/// Dual pairing <u, u*> realized as the dot product of coordinates.
double pair(const Eigen::VectorXd& u, const Functional& f);

/// p-norm of u under the space's exponent.
double norm(const Eigen::VectorXd& u, const SpaceSpec& s);

}  // namespace cylwiener
