#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "cylwiener/cylmeasure.hpp"
#include "cylwiener/rkhs.hpp"
#include "cylwiener/space.hpp"
#include "cylwiener/stat.hpp"

namespace cylwiener {

struct TimeGrid {
    double horizon = 1.0;  // T
    int steps = 1;         // M uniform steps, points t_j = j T / M

    void validate() const;
    double dt() const { return horizon / steps; }
    double point(int j) const { return horizon * j / steps; }
};

// Brownian driver increments: per (path, coordinate k) an independent
// substream of N(0, dt) draws. Regeneration from (seed, path, k) is
// bit-identical regardless of thread count.
struct DriverPaths {
    long n_paths = 0;
    int rank = 0;
    int steps = 0;
    double dt = 0.0;
    std::uint64_t seed = 0;
    std::vector<double> increments;  // [(p * rank + k) * steps + j]

    double increment(long p, int k, int j) const {
        return increments[static_cast<std::size_t>((p * rank + k) * steps + j)];
    }
    double& increment(long p, int k, int j) {
        return increments[static_cast<std::size_t>((p * rank + k) * steps + j)];
    }
};

DriverPaths gen_drivers(int rank, const TimeGrid& grid, long n_paths, std::uint64_t seed);

// Test fixture: shifts every increment by delta, breaking centredness (and
// with it the martingale/covariance laws) on purpose.
void add_increment_drift(DriverPaths& drivers, double delta);

// Scalar evaluations W(t_j) applied to each functional, per path.
struct CylPathEval {
    long n_paths = 0;
    int n_functionals = 0;
    int steps = 0;
    std::uint64_t seed = 0;
    std::vector<double> values;  // [(p * n_functionals + i) * (steps + 1) + j]

    double value(long p, int i, int j) const {
        return values[static_cast<std::size_t>((p * n_functionals + i) * (steps + 1) + j)];
    }
};

// Vector-valued states W(t_j), per path.
struct VecPathEval {
    long n_paths = 0;
    int dim = 0;
    int steps = 0;
    std::uint64_t seed = 0;
    std::vector<double> values;  // [(p * (steps + 1) + j) * dim + d]

    double value(long p, int j, int d) const {
        return values[static_cast<std::size_t>((p * (steps + 1) + j) * dim + d)];
    }
};

// W(t)u* = sum_k <embed col k, u*> B_k(t), cumulative over increments. Exact
// in k since the factor rank is finite.
CylPathEval eval_cyl_wiener(const RkhsFactor& rk, const DriverPaths& drivers,
                            const std::vector<Functional>& fs);

// W(t) = sum_k (embed col k) B_k(t). Pairing the states with a functional
// reproduces eval_cyl_wiener up to rounding.
VecPathEval eval_vec_wiener(const RkhsFactor& rk, const DriverPaths& drivers);

// Statistical property suite on simulated paths:
//   - second-moment law E[W(s)u* W(t)v*] = min(s,t) <Q u*, v*> on a grid of
//     (s,t) pairs (uncentred, so mean drift shows up here too),
//   - mean zero at each probe time,
//   - independence of disjoint increments (correlation near 0),
//   - Gaussianity of marginals (moment-based normality),
//   - stationarity: Var of increments depends only on the gap length.
StatReport wiener_property_suite(const CylPathEval& paths, const CovOperator& q,
                                 const std::vector<Functional>& fs, const TimeGrid& grid,
                                 const CheckContext& ctx, const VerdictRule& rule = {});

// CSV dump, header `path,functional,t,value`.
void write_paths_csv(std::ostream& os, const CylPathEval& eval, const TimeGrid& grid);

// Binary dump, little-endian: int64 n_paths, int64 n_functionals,
// int64 n_times, then values as row-major doubles (path, functional, time).
void write_paths_binary(std::ostream& os, const CylPathEval& eval);

}  // namespace cylwiener
