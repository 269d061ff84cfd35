#pragma once

#include <descore/model.hpp>
#include <descore/penalties.hpp>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

namespace testutil {

using descore::Index;
using descore::Matrix;
using descore::Vector;

inline Matrix random_matrix(Index rows, Index cols, std::mt19937_64& rng, double sd = 1.0) {
    std::normal_distribution<double> nd(0.0, sd);
    Matrix M(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) M(i, j) = nd(rng);
    return M;
}

inline Vector random_vector(Index n, std::mt19937_64& rng, double sd = 1.0) {
    std::normal_distribution<double> nd(0.0, sd);
    Vector v(n);
    for (Index i = 0; i < n; ++i) v(i) = nd(rng);
    return v;
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b))); }

inline double max_rel_err(const Matrix& a, const Matrix& b) {
    double scale = std::max(1.0, std::max(a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff()));
    return (a - b).cwiseAbs().maxCoeff() / scale;
}

// Responses drawn from the model at beta.
inline Vector draw_response(const std::string& family, const Matrix& Q, const Vector& beta, std::mt19937_64& rng) {
    Vector eta = Q * beta;
    Vector y(eta.size());
    std::normal_distribution<double> nd(0.0, 1.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (Index i = 0; i < eta.size(); ++i) {
        if (family == "logistic") {
            y(i) = u(rng) < 1.0 / (1.0 + std::exp(-eta(i))) ? 1.0 : 0.0;
        } else if (family == "poisson") {
            std::poisson_distribution<int> pd(std::exp(eta(i)));
            y(i) = pd(rng);
        } else {
            y(i) = eta(i) + nd(rng);
        }
    }
    return y;
}

// Proximal gradient (ISTA) on (1/n) sum w (t - X b)^2 + lambda ||b||_1.
inline Vector ista_weighted(const Matrix& X, const Vector& t, const Vector& w, double lambda, int iters) {
    const double n = static_cast<double>(X.rows());
    Matrix H = 2.0 * X.transpose() * w.asDiagonal() * X / n;
    double L = Eigen::SelfAdjointEigenSolver<Matrix>(H).eigenvalues().maxCoeff();
    Vector b = Vector::Zero(X.cols());
    for (int it = 0; it < iters; ++it) {
        Vector g = -2.0 * X.transpose() * w.cwiseProduct(t - X * b) / n;
        Vector v = b - g / L;
        for (Index j = 0; j < v.size(); ++j) b(j) = descore::soft_threshold(v(j), lambda / L);
    }
    return b;
}

// Exact minimum of ||w||_1 over {w : ||b - A w||_inf <= lambda} for small m.
// Within each orthant the objective is linear, so the optimum sits at a point
// where m of the hyperplanes {a_k^T w = b_k +- lambda} U {w_j = 0} intersect.
inline double vertex_enumeration_min(const Matrix& A, const Vector& b, double lambda) {
    const Index m = A.rows();
    std::vector<std::pair<Vector, double>> planes;
    for (Index k = 0; k < m; ++k) {
        planes.emplace_back(A.row(k).transpose(), b(k) + lambda);
        planes.emplace_back(A.row(k).transpose(), b(k) - lambda);
    }
    for (Index j = 0; j < m; ++j) planes.emplace_back(Vector::Unit(m, j), 0.0);

    double best = std::numeric_limits<double>::infinity();
    const std::size_t P = planes.size();
    std::vector<std::size_t> idx(static_cast<std::size_t>(m));
    // iterate over all m-subsets of the planes
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t start, std::size_t depth) {
        if (depth == static_cast<std::size_t>(m)) {
            Matrix M(m, m);
            Vector r(m);
            for (Index k = 0; k < m; ++k) {
                M.row(k) = planes[idx[static_cast<std::size_t>(k)]].first.transpose();
                r(k) = planes[idx[static_cast<std::size_t>(k)]].second;
            }
            Eigen::FullPivLU<Matrix> lu(M);
            if (lu.rank() < m) return;
            Vector w = lu.solve(r);
            if ((b - A * w).lpNorm<Eigen::Infinity>() <= lambda + 1e-10) best = std::min(best, w.lpNorm<1>());
            return;
        }
        for (std::size_t p = start; p < P; ++p) {
            idx[depth] = p;
            rec(p + 1, depth + 1);
        }
    };
    rec(0, 0);
    return best;
}

}  // namespace testutil
