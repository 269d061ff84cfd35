#include <algorithm>
#include <functional>
#include <cmath>
#include <numeric>
#include <random>

#include "descore/errors.hpp"
#include "descore/solvers.hpp"

namespace descore {

std::vector<int> fold_assignment(Index n, int folds, std::uint64_t seed) {
    if (folds < 2) throw InvalidArgument("cross-validation needs at least 2 folds");
    if (n < folds) throw InvalidArgument("cross-validation needs n >= folds");
    std::vector<Index> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), Index{0});
    std::mt19937_64 rng(seed);
    for (Index i = n - 1; i > 0; --i) {
        std::uniform_int_distribution<Index> pick(0, i);
        std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(pick(rng))]);
    }
    std::vector<int> label(static_cast<std::size_t>(n));
    for (Index k = 0; k < n; ++k) label[static_cast<std::size_t>(perm[static_cast<std::size_t>(k)])] = static_cast<int>(k % folds);
    return label;
}

std::vector<double> default_lambda_grid(const Matrix& X, const Vector& y, const ModelFamily& family,
                                        const std::optional<Vector>& offset, int count, double ratio) {
    if (count < 1) throw InvalidArgument("lambda grid needs at least one point");
    if (!(ratio > 0.0 && ratio <= 1.0)) throw InvalidArgument("lambda grid ratio must lie in (0, 1]");
    Vector eta = offset ? *offset : Vector::Zero(X.rows());
    Vector g(eta.size());
    for (Index i = 0; i < eta.size(); ++i) g(i) = family.scale() * (family.b1(eta(i)) - y(i));
    double lmax = (X.transpose() * g).lpNorm<Eigen::Infinity>() / static_cast<double>(X.rows());
    if (!(lmax > 0.0)) lmax = 1e-8;
    std::vector<double> grid(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
        double frac = count == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(count - 1);
        grid[static_cast<std::size_t>(k)] = lmax * std::pow(ratio, frac);
    }
    return grid;
}

CrossValidation cross_validate(const Matrix& X, const Vector& y, const ModelFamily& family,
                               const PenaltyConfig& penalty, std::vector<double> grid, int folds,
                               std::uint64_t seed, const SolverConfig& cfg, const std::optional<Vector>& offset) {
    if (grid.empty()) throw InvalidArgument("cross-validation grid is empty");
    for (double l : grid)
        if (!(l >= 0.0)) throw InvalidArgument("cross-validation grid values must be >= 0");
    std::sort(grid.begin(), grid.end(), std::greater<>());
    const Index n = X.rows();
    std::vector<int> label = fold_assignment(n, folds, seed);

    std::vector<double> total(grid.size(), 0.0);
    for (int f = 0; f < folds; ++f) {
        IndexList train, test;
        for (Index i = 0; i < n; ++i) (label[static_cast<std::size_t>(i)] == f ? test : train).push_back(i);
        Matrix Xtr = X(train, Eigen::all), Xte = X(test, Eigen::all);
        Vector ytr = y(train), yte = y(test);
        FitOptions opts;
        Vector off_te = Vector::Zero(static_cast<Index>(test.size()));
        if (offset) {
            opts.offset = Vector((*offset)(train));
            off_te = (*offset)(test);
        }
        for (std::size_t g = 0; g < grid.size(); ++g) {
            PenalizedFit fit = fit_penalized(Xtr, ytr, family, penalty.with_lambda(grid[g]), cfg, opts);
            opts.warm_start = fit.beta;
            Vector eta = Xte * fit.beta + off_te;
            double loss = 0.0;
            for (Index i = 0; i < eta.size(); ++i) {
                if (family.is_gaussian()) {
                    double r = yte(i) - eta(i);
                    loss += 0.5 * family.scale() * r * r;
                } else {
                    loss += family.b(eta(i)) - yte(i) * eta(i);
                }
            }
            total[g] += loss;
        }
    }

    CrossValidation cv;
    cv.curve.resize(grid.size());
    std::size_t best = 0;
    for (std::size_t g = 0; g < grid.size(); ++g) {
        cv.curve[g] = total[g] / static_cast<double>(n);
        if (cv.curve[g] < cv.curve[best]) best = g;
    }
    cv.lambda = grid[best];
    cv.grid = std::move(grid);
    return cv;
}

double cross_validate_lambda(const Dataset& data, const ModelFamily& family, const std::vector<double>& grid, int folds,
                             std::uint64_t seed, const PenaltyConfig& penalty, const SolverConfig& cfg) {
    return cross_validate(data.Q(), data.y(), family, penalty, grid, folds, seed, cfg).lambda;
}

}  // namespace descore
