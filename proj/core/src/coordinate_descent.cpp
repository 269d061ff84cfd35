#include "coordinate_descent.hpp"

#include <cmath>

namespace descore::detail {

namespace {

template <class Update>
CdResult run_sweeps(Index d, const Vector& beta, int max_sweeps, double tol, bool active_set, Update&& update,
                    const std::function<void()>& after_sweep) {
    CdResult res;
    std::vector<Index> active;
    active.reserve(static_cast<std::size_t>(d));
    while (res.sweeps < max_sweeps) {
        double change = 0.0;
        for (Index j = 0; j < d; ++j) change = std::max(change, update(j));
        ++res.sweeps;
        if (after_sweep) after_sweep();
        if (change < tol) {
            res.converged = true;
            break;
        }
        if (!active_set) continue;
        active.clear();
        for (Index j = 0; j < d; ++j)
            if (beta(j) != 0.0) active.push_back(j);
        while (res.sweeps < max_sweeps) {
            double inner = 0.0;
            for (Index j : active) inner = std::max(inner, update(j));
            ++res.sweeps;
            if (after_sweep) after_sweep();
            if (inner < tol) break;
        }
    }
    return res;
}

}  // namespace

CdResult coordinate_descent(const Matrix& X, const Matrix& WX, const Vector& curv, const PenaltyConfig& pen,
                            Vector& beta, Vector& u, int max_sweeps, double tol, bool active_set,
                            const std::function<void()>& after_sweep) {
    const double inv_n = 1.0 / static_cast<double>(X.rows());
    auto update = [&](Index j) -> double {
        double old = beta(j);
        double c = curv(j);
        double next = 0.0;
        if (c > 0.0) {
            double z = inv_n * X.col(j).dot(u) + c * old;
            next = univariate_prox(pen, z, c);
        }
        double delta = next - old;
        if (delta != 0.0) {
            beta(j) = next;
            u.noalias() -= delta * WX.col(j);
        }
        return std::abs(delta);
    };
    return run_sweeps(X.cols(), beta, max_sweeps, tol, active_set, update, after_sweep);
}

CdResult coordinate_descent_cov(const Matrix& A, const PenaltyConfig& pen, Vector& beta, Vector& g,
                                int max_sweeps, double tol, bool active_set) {
    auto update = [&](Index j) -> double {
        double old = beta(j);
        double c = A(j, j);
        double next = 0.0;
        if (c > 0.0) next = univariate_prox(pen, g(j) + c * old, c);
        double delta = next - old;
        if (delta != 0.0) {
            beta(j) = next;
            g.noalias() -= delta * A.col(j);
        }
        return std::abs(delta);
    };
    return run_sweeps(A.cols(), beta, max_sweeps, tol, active_set, update, {});
}

}  // namespace descore::detail
