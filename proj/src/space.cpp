#include "cylwiener/space.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "cylwiener/errors.hpp"

namespace cylwiener {

SpaceSpec SpaceSpec::finite(int dim, double p) {
    SpaceSpec s{dim, p, Kind::Finite};
    s.validate();
    return s;
}

SpaceSpec SpaceSpec::truncated(int level, double p) {
    SpaceSpec s{level, p, Kind::TruncatedSequence};
    s.validate();
    return s;
}

void SpaceSpec::validate() const {
    if (dim < 1) throw ConfigError("space dim must be >= 1, got " + std::to_string(dim));
    if (std::isnan(p) || p < 1.0)
        throw ConfigError("norm exponent p must satisfy p >= 1 (or infinity), got " +
                          std::to_string(p));
}

Functional::Functional(std::initializer_list<double> c) : coeffs(static_cast<long>(c.size())) {
    long i = 0;
    for (double x : c) coeffs[i++] = x;
}

void CylinderSet::validate() const {
    if (functionals.empty()) throw std::invalid_argument("cylinder set needs >= 1 functional");
    if (base.size() != functionals.size())
        throw std::invalid_argument("cylinder set: base box arity must match functional count");
    const int d = functionals.front().dim();
    for (const auto& f : functionals)
        if (f.dim() != d)
            throw std::invalid_argument("cylinder set: functionals must share the ambient dim");
    for (const auto& iv : base)
        if (!(iv.lo <= iv.hi)) throw std::invalid_argument("cylinder set: empty interval bound");
}

double pair(const Eigen::VectorXd& u, const Functional& f) {
    if (u.size() != f.coeffs.size())
        throw std::invalid_argument("pair: dimension mismatch (" + std::to_string(u.size()) +
                                    " vs " + std::to_string(f.coeffs.size()) + ")");
    return u.dot(f.coeffs);
}

double norm(const Eigen::VectorXd& u, const SpaceSpec& s) {
    s.validate();
    if (u.size() != s.dim)
        throw std::invalid_argument("norm: vector dim " + std::to_string(u.size()) +
                                    " does not match space dim " + std::to_string(s.dim));
    if (std::isinf(s.p)) return u.cwiseAbs().maxCoeff();
    if (s.p == 2.0) return u.norm();
    if (s.p == 1.0) return u.cwiseAbs().sum();
    double acc = 0.0;
    for (long i = 0; i < u.size(); ++i) acc += std::pow(std::abs(u[i]), s.p);
    return std::pow(acc, 1.0 / s.p);
}

}  // namespace cylwiener
