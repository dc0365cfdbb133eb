#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <random>
#include <vector>

#include "cylwiener/integrate.hpp"
#include "cylwiener/rng.hpp"
#include "cylwiener/simulate.hpp"
#include "cylwiener/space.hpp"

namespace testutil {

inline Eigen::MatrixXd random_gaussian_matrix(int rows, int cols, std::mt19937_64& eng) {
    cylwiener::GaussianDraw gauss;
    Eigen::MatrixXd m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = gauss(eng);
    return m;
}

// PSD matrix of the given dimension and rank (rank < dim gives a genuinely
// rank-deficient operator).
inline Eigen::MatrixXd random_psd(int dim, int rank, std::mt19937_64& eng) {
    if (rank == 0) return Eigen::MatrixXd::Zero(dim, dim);
    const Eigen::MatrixXd a = random_gaussian_matrix(dim, rank, eng);
    Eigen::MatrixXd q = a * a.transpose();
    return 0.5 * (q + q.transpose().eval());
}

inline cylwiener::Functional random_functional(int dim, std::mt19937_64& eng) {
    cylwiener::GaussianDraw gauss;
    Eigen::VectorXd v(dim);
    for (int i = 0; i < dim; ++i) v(i) = gauss(eng);
    return cylwiener::Functional{v};
}

// Piecewise-constant integrand with boundaries on the grid.
inline cylwiener::Integrand random_integrand(int dim_v, int dim_u,
                                             const cylwiener::TimeGrid& grid, int n_pieces,
                                             std::mt19937_64& eng) {
    n_pieces = std::min(n_pieces, grid.steps);
    std::vector<int> cuts{0, grid.steps};
    std::uniform_int_distribution<int> pick(1, grid.steps - 1);
    while (static_cast<int>(cuts.size()) < n_pieces + 1) {
        const int c = pick(eng);
        if (std::find(cuts.begin(), cuts.end(), c) == cuts.end()) cuts.push_back(c);
    }
    std::sort(cuts.begin(), cuts.end());

    std::vector<cylwiener::IntegrandPiece> pieces;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        pieces.push_back(cylwiener::IntegrandPiece{
            grid.point(cuts[i]), grid.point(cuts[i + 1]),
            random_gaussian_matrix(dim_v, dim_u, eng)});
    return cylwiener::Integrand(std::move(pieces));
}

}  // namespace testutil
