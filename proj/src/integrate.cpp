#include "cylwiener/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cylwiener/errors.hpp"
#include "cylwiener/parallel.hpp"
#include "cylwiener/rng.hpp"

namespace cylwiener {

Integrand::Integrand(std::vector<IntegrandPiece> pieces) : pieces_(std::move(pieces)) {
    if (pieces_.empty()) throw std::invalid_argument("Integrand: need at least one piece");
    dim_v_ = static_cast<int>(pieces_.front().matrix.rows());
    dim_u_ = static_cast<int>(pieces_.front().matrix.cols());
    if (dim_u_ < 1 || dim_v_ < 1)
        throw std::invalid_argument("Integrand: piece matrices must be non-empty");
    double cursor = 0.0;
    const double span = pieces_.back().t_end;
    for (const auto& p : pieces_) {
        if (p.matrix.rows() != dim_v_ || p.matrix.cols() != dim_u_)
            throw std::invalid_argument("Integrand: inconsistent piece matrix shapes");
        if (!p.matrix.allFinite())
            throw std::invalid_argument("Integrand: piece matrix has non-finite entries");
        if (!(p.t_end > p.t_start))
            throw std::invalid_argument("Integrand: piece interval must have positive length");
        if (std::abs(p.t_start - cursor) > 1e-9 * std::max(1.0, span))
            throw std::invalid_argument(
                "Integrand: pieces must chain contiguously from 0 to the horizon");
        cursor = p.t_end;
    }
    if (std::abs(pieces_.front().t_start) > 1e-9 * std::max(1.0, span))
        throw std::invalid_argument("Integrand: first piece must start at 0");
}

Integrand Integrand::constant(Eigen::MatrixXd matrix, const TimeGrid& grid) {
    grid.validate();
    return Integrand({IntegrandPiece{0.0, grid.horizon, std::move(matrix)}});
}

std::vector<int> Integrand::step_pieces(const TimeGrid& grid) const {
    grid.validate();
    const double tol = 1e-9 * std::max(1.0, grid.horizon);
    if (std::abs(pieces_.back().t_end - grid.horizon) > tol)
        throw std::invalid_argument("Integrand: pieces do not cover the grid horizon");

    std::vector<int> map(static_cast<std::size_t>(grid.steps), -1);
    std::size_t piece = 0;
    for (int j = 0; j < grid.steps; ++j) {
        const double left = grid.point(j);
        while (piece + 1 < pieces_.size() && left >= pieces_[piece].t_end - tol) ++piece;
        // The left endpoint decides the piece (Ito convention); the piece
        // boundary itself must sit on a grid point.
        if (left < pieces_[piece].t_start - tol || left > pieces_[piece].t_end - tol)
            throw std::invalid_argument("Integrand: piece boundaries must align with the grid");
        map[static_cast<std::size_t>(j)] = static_cast<int>(piece);
    }
    for (std::size_t p = 0; p < pieces_.size(); ++p) {
        const double b = pieces_[p].t_start;
        const double idx = b / grid.dt();
        if (std::abs(idx - std::round(idx)) > 1e-6)
            throw std::invalid_argument("Integrand: piece boundaries must align with the grid");
    }
    return map;
}

IntegralSamples ito_integral(const Integrand& phi, const RkhsFactor& rk,
                             const DriverPaths& drivers, const TimeGrid& grid,
                             const std::vector<Functional>& fs, bool keep_running) {
    if (phi.dim_u() != rk.dim())
        throw std::invalid_argument("ito_integral: integrand input dimension does not match Q");
    if (drivers.rank != rk.rank)
        throw std::invalid_argument("ito_integral: driver rank does not match the factor");
    if (drivers.steps != grid.steps)
        throw std::invalid_argument("ito_integral: drivers were drawn on a different grid");
    if (fs.empty()) throw std::invalid_argument("ito_integral: need at least one functional");
    for (const auto& f : fs)
        if (f.coeffs.size() != phi.dim_v())
            throw std::invalid_argument("ito_integral: functional dimension does not match V");

    const std::vector<int> piece_of = phi.step_pieces(grid);
    const int n_fs = static_cast<int>(fs.size());

    // coeff[piece](k, i) = <phi_piece (embed col k), v_i> = (embed^T phi^T v_i)_k
    std::vector<Eigen::MatrixXd> coeff(phi.pieces().size());
    for (std::size_t p = 0; p < phi.pieces().size(); ++p) {
        coeff[p].resize(rk.rank, n_fs);
        for (int i = 0; i < n_fs; ++i)
            coeff[p].col(i) =
                rk.embed.transpose() *
                (phi.pieces()[p].matrix.transpose() * fs[static_cast<std::size_t>(i)].coeffs);
    }

    IntegralSamples out;
    out.n_paths = drivers.n_paths;
    out.n_functionals = n_fs;
    out.steps = grid.steps;
    out.has_running = keep_running;
    out.finals.assign(static_cast<std::size_t>(drivers.n_paths) * n_fs, 0.0);
    if (keep_running)
        out.running.assign(static_cast<std::size_t>(drivers.n_paths) * n_fs * (grid.steps + 1),
                           0.0);

    parallel_for(drivers.n_paths, [&](std::int64_t p) {
        for (int i = 0; i < n_fs; ++i) {
            double acc = 0.0;
            double* run =
                keep_running
                    ? out.running.data() +
                          static_cast<std::size_t>((p * n_fs + i)) * (grid.steps + 1)
                    : nullptr;
            if (run) run[0] = 0.0;
            for (int j = 0; j < grid.steps; ++j) {
                const Eigen::MatrixXd& c = coeff[static_cast<std::size_t>(
                    piece_of[static_cast<std::size_t>(j)])];
                double dI = 0.0;
                for (int k = 0; k < drivers.rank; ++k)
                    dI += c(k, i) * drivers.increment(p, k, j);
                acc += dI;
                if (run) run[j + 1] = acc;
            }
            out.finals[static_cast<std::size_t>(p * n_fs + i)] = acc;
        }
    });
    return out;
}

double isometry_target(const Integrand& phi, const RkhsFactor& rk, const TimeGrid& grid,
                       const Functional& v) {
    grid.validate();
    const std::vector<int> piece_of = phi.step_pieces(grid);
    double total = 0.0;
    for (int j = 0; j < grid.steps; ++j) {
        const auto& m = phi.pieces()[static_cast<std::size_t>(
            piece_of[static_cast<std::size_t>(j)])].matrix;
        total += grid.dt() * (rk.embed.transpose() * (m.transpose() * v.coeffs)).squaredNorm();
    }
    return total;
}

StatReport isometry_check(const Integrand& phi, const RkhsFactor& rk,
                          const std::vector<Functional>& fs, const IntegralSamples& samples,
                          const TimeGrid& grid, const CheckContext& ctx,
                          const VerdictRule& rule) {
    if (static_cast<int>(fs.size()) != samples.n_functionals)
        throw std::invalid_argument("isometry_check: functional list does not match samples");
    if (samples.n_paths < 1000)
        throw std::invalid_argument("isometry_check: need at least 1000 paths");

    StatReport rep;
    std::vector<double> sq(static_cast<std::size_t>(samples.n_paths));
    for (int i = 0; i < samples.n_functionals; ++i) {
        for (long p = 0; p < samples.n_paths; ++p) {
            const double x = samples.final_value(p, i);
            sq[static_cast<std::size_t>(p)] = x * x;
        }
        const MeanSE ms = mean_se(sq);
        const double target = isometry_target(phi, rk, grid, fs[static_cast<std::size_t>(i)]);
        rep.entries.push_back(check_estimate("ito-isometry[v" + std::to_string(i) + "]",
                                             ms.mean, target, ms.se, ctx, rule));
    }
    return rep;
}

Eigen::MatrixXd random_rotation(int n, std::uint64_t seed) {
    if (n < 1) throw ConfigError("random_rotation: dimension must be >= 1");
    std::mt19937_64 eng(substream(seed, 0, 0));
    GaussianDraw gauss;
    Eigen::MatrixXd g(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g(i, j) = gauss(eng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ();
    const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < n; ++j)
        if (r(j, j) < 0.0) q.col(j) = -q.col(j);
    return q;
}

double basis_change_diff(const Integrand& phi, const RkhsFactor& rk,
                         const DriverPaths& drivers, const TimeGrid& grid,
                         const std::vector<Functional>& fs, const Eigen::MatrixXd& rotation) {
    if (rotation.rows() != rk.rank || rotation.cols() != rk.rank)
        throw ConfigError("basis_change_diff: rotation shape must match the factor rank");
    const double orth =
        (rotation.transpose() * rotation - Eigen::MatrixXd::Identity(rk.rank, rk.rank))
            .cwiseAbs()
            .maxCoeff();
    if (orth > 1e-10)
        throw ConfigError("basis_change_diff: rotation is not orthogonal");

    // Rotated orthonormal basis f_l = sum_k R_lk e_k: the embedding columns
    // become embed R^T and the matching drivers C_l = sum_k R_lk B_k.
    RkhsFactor rotated = rk;
    rotated.embed = rk.embed * rotation.transpose();

    DriverPaths rotated_drivers = drivers;
    parallel_for(drivers.n_paths, [&](std::int64_t p) {
        Eigen::VectorXd b(drivers.rank), c(drivers.rank);
        for (int j = 0; j < drivers.steps; ++j) {
            for (int k = 0; k < drivers.rank; ++k) b(k) = drivers.increment(p, k, j);
            c.noalias() = rotation * b;
            for (int k = 0; k < drivers.rank; ++k) rotated_drivers.increment(p, k, j) = c(k);
        }
    });

    const IntegralSamples a = ito_integral(phi, rk, drivers, grid, fs, false);
    const IntegralSamples b = ito_integral(phi, rotated, rotated_drivers, grid, fs, false);
    double diff = 0.0;
    for (std::size_t i = 0; i < a.finals.size(); ++i)
        diff = std::max(diff, std::abs(a.finals[i] - b.finals[i]));
    return diff;
}

StatReport basis_independence_check(const Integrand& phi, const RkhsFactor& rk,
                                    const DriverPaths& drivers, const TimeGrid& grid,
                                    const std::vector<Functional>& fs, std::uint64_t seed,
                                    int n_rotations, const CheckContext& ctx) {
    if (rk.rank < 1)
        throw ConfigError("basis_independence_check: factor rank is zero, nothing to rotate");
    if (n_rotations < 1)
        throw ConfigError("basis_independence_check: need at least one rotation");

    const IntegralSamples base = ito_integral(phi, rk, drivers, grid, fs, false);
    double scale = 1.0;
    for (double x : base.finals) scale = std::max(scale, std::abs(x));

    StatReport rep;
    const VerdictRule rule{4.0, 0.0};
    for (int r = 0; r < n_rotations; ++r) {
        const Eigen::MatrixXd rot =
            random_rotation(rk.rank, splitmix64(seed ^ static_cast<std::uint64_t>(r)));
        const double diff = basis_change_diff(phi, rk, drivers, grid, fs, rot);
        rep.entries.push_back(check_exact("basis-independence[rotation " + std::to_string(r) +
                                              "]",
                                          diff, 1e-9 * scale, ctx, rule));
    }
    return rep;
}

StatReport martingale_check(const IntegralSamples& samples, const TimeGrid& grid,
                            const CheckContext& ctx, const VerdictRule& rule) {
    if (!samples.has_running)
        throw std::invalid_argument("martingale_check: running values were not retained");
    if (samples.n_paths < 1000)
        throw std::invalid_argument("martingale_check: need at least 1000 paths");
    if (samples.steps != grid.steps)
        throw std::invalid_argument("martingale_check: grid does not match samples");

    std::vector<int> ladder{0, std::max(1, grid.steps / 4), std::max(1, grid.steps / 2),
                            std::max(1, 3 * grid.steps / 4), grid.steps};
    ladder.erase(std::unique(ladder.begin(), ladder.end()), ladder.end());

    StatReport rep;
    const long n = samples.n_paths;
    std::vector<double> buf(static_cast<std::size_t>(n));
    const char* gnames[3] = {"g=1", "g=value", "g=sign"};

    for (int i = 0; i < samples.n_functionals; ++i) {
        for (std::size_t l = 0; l + 1 < ladder.size(); ++l) {
            const int jt = ladder[l];
            const int jtp = ladder[l + 1];
            for (int g = 0; g < 3; ++g) {
                for (long p = 0; p < n; ++p) {
                    const double at = samples.running_value(p, i, jt);
                    const double inc = samples.running_value(p, i, jtp) - at;
                    double weight = 1.0;
                    if (g == 1) weight = at;
                    if (g == 2) weight = at > 0.0 ? 1.0 : (at < 0.0 ? -1.0 : 0.0);
                    buf[static_cast<std::size_t>(p)] = inc * weight;
                }
                const MeanSE ms = mean_se(buf);
                rep.entries.push_back(check_estimate(
                    "martingale[v" + std::to_string(i) + ",t=" + std::to_string(jt) + "/" +
                        std::to_string(grid.steps) + "->" + std::to_string(jtp) + "/" +
                        std::to_string(grid.steps) + "," + gnames[g] + "]",
                    ms.mean, 0.0, ms.se, ctx, rule));
            }
        }
    }
    return rep;
}

Eigen::MatrixXd induced_covariance(const Integrand& phi, const RkhsFactor& rk,
                                   const TimeGrid& grid) {
    const std::vector<int> piece_of = phi.step_pieces(grid);
    Eigen::MatrixXd r = Eigen::MatrixXd::Zero(phi.dim_v(), phi.dim_v());
    for (int j = 0; j < grid.steps; ++j) {
        const auto& m = phi.pieces()[static_cast<std::size_t>(
            piece_of[static_cast<std::size_t>(j)])].matrix;
        const Eigen::MatrixXd fm = m * rk.embed;
        r.noalias() += grid.dt() * fm * fm.transpose();
    }
    return r;
}

StatReport induced_covariance_check(const Integrand& phi, const RkhsFactor& rk,
                                    const std::vector<Functional>& fs,
                                    const IntegralSamples& samples, const TimeGrid& grid,
                                    const CheckContext& ctx, const VerdictRule& rule) {
    if (static_cast<int>(fs.size()) != samples.n_functionals)
        throw std::invalid_argument(
            "induced_covariance_check: functional list does not match samples");
    if (samples.n_paths < 1000)
        throw std::invalid_argument("induced_covariance_check: need at least 1000 paths");

    const Eigen::MatrixXd r = induced_covariance(phi, rk, grid);
    StatReport rep;
    const long n = samples.n_paths;
    std::vector<double> buf(static_cast<std::size_t>(n));

    for (int i = 0; i < samples.n_functionals; ++i) {
        for (int j = i; j < samples.n_functionals; ++j) {
            for (long p = 0; p < n; ++p)
                buf[static_cast<std::size_t>(p)] =
                    samples.final_value(p, i) * samples.final_value(p, j);
            const MeanSE ms = mean_se(buf);
            const double target = (r * fs[static_cast<std::size_t>(i)].coeffs)
                                      .dot(fs[static_cast<std::size_t>(j)].coeffs);
            rep.entries.push_back(check_estimate("induced-covariance[v" + std::to_string(i) +
                                                     ",v" + std::to_string(j) + "]",
                                                 ms.mean, target, ms.se, ctx, rule));
        }
    }
    for (int i = 0; i < samples.n_functionals; ++i) {
        for (long p = 0; p < n; ++p) buf[static_cast<std::size_t>(p)] = samples.final_value(p, i);
        const MeanSE ms = mean_se(buf);
        rep.entries.push_back(check_estimate("induced-mean-zero[v" + std::to_string(i) + "]",
                                             ms.mean, 0.0, ms.se, ctx, rule));
        const NormalityStat ns = normality_stat(buf);
        if (ns.degenerate) {
            rep.entries.push_back(check_exact(
                "induced-normality[v" + std::to_string(i) + ",degenerate]", 0.0, 1.0, ctx, rule));
        } else {
            rep.entries.push_back(
                check_pvalue("induced-normality[v" + std::to_string(i) + "]", ns.p, ctx, rule));
        }
    }
    return rep;
}

StatReport hilbert_agreement_check(const Integrand& phi, const RkhsFactor& rk,
                                   const DriverPaths& drivers, const TimeGrid& grid,
                                   const std::vector<Functional>& fs, RadonState extension,
                                   const CheckContext& ctx) {
    if (extension == RadonState::not_radonifying)
        throw std::invalid_argument(
            "hilbert_agreement_check: the covariance spectrum is not square-summable, so no "
            "vector-valued process induces this cylindrical one and there is no vector-valued "
            "integral to compare against");

    const IntegralSamples cyl = ito_integral(phi, rk, drivers, grid, fs, false);
    const std::vector<int> piece_of = phi.step_pieces(grid);
    const int n_fs = static_cast<int>(fs.size());

    // V-valued integral as plain matrix arithmetic on vector increments.
    std::vector<double> diffs(static_cast<std::size_t>(drivers.n_paths), 0.0);
    double scale = 1.0;
    for (double x : cyl.finals) scale = std::max(scale, std::abs(x));

    parallel_for(drivers.n_paths, [&](std::int64_t p) {
        Eigen::VectorXd acc = Eigen::VectorXd::Zero(phi.dim_v());
        Eigen::VectorXd db(drivers.rank);
        for (int j = 0; j < drivers.steps; ++j) {
            for (int k = 0; k < drivers.rank; ++k) db(k) = drivers.increment(p, k, j);
            const Eigen::VectorXd dw = rk.embed * db;
            acc.noalias() +=
                phi.pieces()[static_cast<std::size_t>(piece_of[static_cast<std::size_t>(j)])]
                    .matrix *
                dw;
        }
        double worst = 0.0;
        for (int i = 0; i < n_fs; ++i) {
            const double paired = acc.dot(fs[static_cast<std::size_t>(i)].coeffs);
            worst = std::max(worst, std::abs(paired - cyl.final_value(p, i)));
        }
        diffs[static_cast<std::size_t>(p)] = worst;
    });

    double diff = 0.0;
    for (double d : diffs) diff = std::max(diff, d);

    StatReport rep;
    rep.entries.push_back(
        check_exact("vector-integral-agreement", diff, 1e-10 * scale, ctx, VerdictRule{4.0, 0.0}));
    return rep;
}

}  // namespace cylwiener
