#include "cylwiener/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <ostream>
#include <stdexcept>

#include "cylwiener/errors.hpp"
#include "cylwiener/parallel.hpp"
#include "cylwiener/rng.hpp"

namespace cylwiener {

void TimeGrid::validate() const {
    if (!(horizon > 0.0) || !std::isfinite(horizon))
        throw ConfigError("grid.horizon must be positive and finite");
    if (steps < 1) throw ConfigError("grid.steps must be >= 1");
}

namespace {
constexpr long kMaxDriverDoubles = 250'000'000;  // ~2 GB of increments
}

DriverPaths gen_drivers(int rank, const TimeGrid& grid, long n_paths, std::uint64_t seed) {
    grid.validate();
    if (rank < 1) throw std::invalid_argument("gen_drivers: rank must be >= 1");
    if (n_paths < 1) throw std::invalid_argument("gen_drivers: n_paths must be >= 1");
    const long footprint = n_paths * static_cast<long>(rank) * grid.steps;
    if (footprint > kMaxDriverDoubles)
        throw ConfigError("gen_drivers: paths*rank*steps = " + std::to_string(footprint) +
                          " doubles exceeds the limit of " + std::to_string(kMaxDriverDoubles));

    DriverPaths d;
    d.n_paths = n_paths;
    d.rank = rank;
    d.steps = grid.steps;
    d.dt = grid.dt();
    d.seed = seed;
    d.increments.resize(static_cast<std::size_t>(footprint));

    const double sd = std::sqrt(d.dt);
    parallel_for(n_paths * rank, [&](std::int64_t idx) {
        const long p = idx / rank;
        const int k = static_cast<int>(idx % rank);
        std::mt19937_64 eng(
            substream(seed, static_cast<std::uint64_t>(p), static_cast<std::uint64_t>(k)));
        GaussianDraw gauss;
        double* row = d.increments.data() + static_cast<std::size_t>(idx) * d.steps;
        for (int j = 0; j < d.steps; ++j) row[j] = sd * gauss(eng);
    });
    return d;
}

void add_increment_drift(DriverPaths& drivers, double delta) {
    for (double& x : drivers.increments) x += delta;
}

CylPathEval eval_cyl_wiener(const RkhsFactor& rk, const DriverPaths& drivers,
                            const std::vector<Functional>& fs) {
    if (drivers.rank != rk.rank)
        throw std::invalid_argument("eval_cyl_wiener: driver rank does not match the factor");
    if (fs.empty()) throw std::invalid_argument("eval_cyl_wiener: need at least one functional");

    const int n_fs = static_cast<int>(fs.size());
    // coeff(k, i) = <embed col k, f_i>
    Eigen::MatrixXd coeff(rk.rank, n_fs);
    for (int i = 0; i < n_fs; ++i) coeff.col(i) = adjoint_embed(rk, fs[static_cast<std::size_t>(i)].coeffs);

    CylPathEval out;
    out.n_paths = drivers.n_paths;
    out.n_functionals = n_fs;
    out.steps = drivers.steps;
    out.seed = drivers.seed;
    out.values.assign(
        static_cast<std::size_t>(drivers.n_paths) * n_fs * (drivers.steps + 1), 0.0);

    parallel_for(drivers.n_paths, [&](std::int64_t p) {
        for (int i = 0; i < n_fs; ++i) {
            double* row =
                out.values.data() +
                static_cast<std::size_t>((p * n_fs + i)) * (drivers.steps + 1);
            row[0] = 0.0;
            for (int j = 0; j < drivers.steps; ++j) {
                double dw = 0.0;
                for (int k = 0; k < drivers.rank; ++k)
                    dw += coeff(k, i) * drivers.increment(p, k, j);
                row[j + 1] = row[j] + dw;
            }
        }
    });
    return out;
}

VecPathEval eval_vec_wiener(const RkhsFactor& rk, const DriverPaths& drivers) {
    if (drivers.rank != rk.rank)
        throw std::invalid_argument("eval_vec_wiener: driver rank does not match the factor");

    VecPathEval out;
    out.n_paths = drivers.n_paths;
    out.dim = rk.dim();
    out.steps = drivers.steps;
    out.seed = drivers.seed;
    out.values.assign(
        static_cast<std::size_t>(drivers.n_paths) * (drivers.steps + 1) * out.dim, 0.0);

    parallel_for(drivers.n_paths, [&](std::int64_t p) {
        Eigen::VectorXd state = Eigen::VectorXd::Zero(out.dim);
        Eigen::VectorXd db(drivers.rank);
        for (int j = 0; j <= drivers.steps; ++j) {
            if (j > 0) {
                for (int k = 0; k < drivers.rank; ++k) db(k) = drivers.increment(p, k, j - 1);
                state.noalias() += rk.embed * db;
            }
            double* slot = out.values.data() +
                           (static_cast<std::size_t>(p) * (drivers.steps + 1) + j) * out.dim;
            Eigen::Map<Eigen::VectorXd>(slot, out.dim) = state;
        }
    });
    return out;
}

namespace {

// Distinct interior probe indices near the quartiles of the grid.
std::vector<int> probe_indices(int steps) {
    std::vector<int> idx{std::max(1, steps / 4), std::max(1, steps / 2),
                         std::max(1, 3 * steps / 4)};
    idx.push_back(steps);
    std::sort(idx.begin(), idx.end());
    idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
    return idx;
}

}  // namespace

StatReport wiener_property_suite(const CylPathEval& paths, const CovOperator& q,
                                 const std::vector<Functional>& fs, const TimeGrid& grid,
                                 const CheckContext& ctx, const VerdictRule& rule) {
    if (static_cast<int>(fs.size()) != paths.n_functionals)
        throw std::invalid_argument("wiener_property_suite: functional list does not match paths");
    if (paths.n_paths < 1000)
        throw std::invalid_argument("wiener_property_suite: need at least 1000 paths");
    if (paths.steps != grid.steps)
        throw std::invalid_argument("wiener_property_suite: grid does not match paths");

    StatReport rep;
    const long n = paths.n_paths;
    const std::vector<int> probes = probe_indices(grid.steps);
    const int n_pair_fs = std::min(2, paths.n_functionals);
    std::vector<double> xs(static_cast<std::size_t>(n)), ys(static_cast<std::size_t>(n)),
        prod(static_cast<std::size_t>(n));

    // (1) second-moment law E[W(s)u* W(t)v*] = min(s,t) <Q u*, v*>, uncentred.
    for (int a = 0; a < n_pair_fs; ++a) {
        for (int b = a; b < n_pair_fs; ++b) {
            const double qq = q.pairing(fs[static_cast<std::size_t>(a)],
                                        fs[static_cast<std::size_t>(b)]);
            for (int js : probes) {
                for (int jt : probes) {
                    if (jt < js) continue;
                    for (long p = 0; p < n; ++p)
                        prod[static_cast<std::size_t>(p)] =
                            paths.value(p, a, js) * paths.value(p, b, jt);
                    const MeanSE ms = mean_se(prod);
                    const double target = std::min(grid.point(js), grid.point(jt)) * qq;
                    rep.entries.push_back(check_estimate(
                        "covariance-law[u" + std::to_string(a) + ",u" + std::to_string(b) +
                            ",s=" + std::to_string(js) + "/" + std::to_string(grid.steps) +
                            ",t=" + std::to_string(jt) + "/" + std::to_string(grid.steps) + "]",
                        ms.mean, target, ms.se, ctx, rule));
                }
            }
        }
    }

    // (2) mean zero at each probe time.
    for (int a = 0; a < n_pair_fs; ++a) {
        for (int js : probes) {
            for (long p = 0; p < n; ++p) xs[static_cast<std::size_t>(p)] = paths.value(p, a, js);
            const MeanSE ms = mean_se(xs);
            rep.entries.push_back(check_estimate(
                "mean-zero[u" + std::to_string(a) + ",t=" + std::to_string(js) + "/" +
                    std::to_string(grid.steps) + "]",
                ms.mean, 0.0, ms.se, ctx, rule));
        }
    }

    // (3) disjoint increments are uncorrelated.
    if (grid.steps >= 2) {
        const int mid = std::max(1, grid.steps / 2);
        const int b = n_pair_fs - 1;
        for (long p = 0; p < n; ++p) {
            xs[static_cast<std::size_t>(p)] = paths.value(p, 0, mid) - paths.value(p, 0, 0);
            ys[static_cast<std::size_t>(p)] =
                paths.value(p, b, grid.steps) - paths.value(p, b, mid);
        }
        const CorrStat cs = corr_test(xs, ys);
        if (cs.degenerate) {
            rep.entries.push_back(
                check_exact("increment-independence[degenerate]", 0.0, 1.0, ctx, rule));
        } else {
            rep.entries.push_back(check_estimate(
                "increment-independence", cs.r, 0.0,
                1.0 / std::sqrt(static_cast<double>(n) - 3.0), ctx, rule));
        }
    }

    // (4) Gaussian marginal at the horizon.
    {
        for (long p = 0; p < n; ++p)
            xs[static_cast<std::size_t>(p)] = paths.value(p, 0, grid.steps);
        const NormalityStat ns = normality_stat(xs);
        if (ns.degenerate) {
            rep.entries.push_back(
                check_exact("marginal-normality[degenerate]", 0.0, 1.0, ctx, rule));
        } else {
            rep.entries.push_back(check_pvalue("marginal-normality", ns.p, ctx, rule));
        }
    }

    // (5) stationarity: two disjoint windows of equal length have equal
    //     increment variance.
    if (grid.steps >= 2) {
        const int h = grid.steps / 2;
        for (long p = 0; p < n; ++p) {
            xs[static_cast<std::size_t>(p)] = paths.value(p, 0, h) - paths.value(p, 0, 0);
            ys[static_cast<std::size_t>(p)] = paths.value(p, 0, 2 * h) - paths.value(p, 0, h);
        }
        const MeanSE v1 = variance_se(xs);
        const MeanSE v2 = variance_se(ys);
        const double comb = std::sqrt(v1.se * v1.se + v2.se * v2.se);
        rep.entries.push_back(
            check_estimate("increment-stationarity", v1.mean - v2.mean, 0.0, comb, ctx, rule));
    }

    return rep;
}

void write_paths_csv(std::ostream& os, const CylPathEval& eval, const TimeGrid& grid) {
    os << "path,functional,t,value\n";
    char buf[64];
    for (long p = 0; p < eval.n_paths; ++p) {
        for (int i = 0; i < eval.n_functionals; ++i) {
            for (int j = 0; j <= eval.steps; ++j) {
                os << p << ',' << i << ',';
                std::snprintf(buf, sizeof buf, "%.17g,%.17g", grid.point(j),
                              eval.value(p, i, j));
                os << buf << '\n';
            }
        }
    }
}

void write_paths_binary(std::ostream& os, const CylPathEval& eval) {
    const std::int64_t dims[3] = {eval.n_paths, eval.n_functionals, eval.steps + 1};
    os.write(reinterpret_cast<const char*>(dims), sizeof dims);
    os.write(reinterpret_cast<const char*>(eval.values.data()),
             static_cast<std::streamsize>(eval.values.size() * sizeof(double)));
}

}  // namespace cylwiener
