#pragma once

#include <functional>
#include <vector>

#include "descore/model.hpp"
#include "descore/penalties.hpp"

namespace descore::detail {

struct CdResult {
    int sweeps = 0;
    bool converged = false;
};

// Coordinate descent on (1/(2n)) sum_i w_i (a_i - x_i beta)^2 + sum_j p(beta_j).
// u holds the weighted residual w .* (a - X beta) and is kept in sync with beta.
// WX = diag(w) X and curv_j = (1/n) sum_i w_i x_ij^2 are supplied by the caller.
CdResult coordinate_descent(const Matrix& X, const Matrix& WX, const Vector& curv, const PenaltyConfig& pen,
                            Vector& beta, Vector& u, int max_sweeps, double tol, bool active_set,
                            const std::function<void()>& after_sweep = {});

// Covariance form for 0.5 beta^T A beta - b^T beta + sum_j p(beta_j); g = b - A beta.
CdResult coordinate_descent_cov(const Matrix& A, const PenaltyConfig& pen, Vector& beta, Vector& g,
                                int max_sweeps, double tol, bool active_set);

}  // namespace descore::detail
