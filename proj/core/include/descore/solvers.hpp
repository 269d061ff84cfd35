#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "descore/model.hpp"
#include "descore/penalties.hpp"

namespace descore {

struct SolverConfig {
    int max_iter = 1000;  // coordinate sweeps (outer Newton steps for GLMs)
    double tol = 1e-7;    // sup-norm coefficient change per sweep
    bool active_set = true;
    bool standardize = false;

    void validate() const;
};

struct PenalizedFit {
    Vector beta;
    double lambda = 0.0;
    PenaltyConfig penalty;
    int iterations = 0;
    bool converged = false;
    double objective = 0.0;
    std::string warning;
    std::vector<double> objective_trace;  // filled when requested
};

struct FitOptions {
    std::optional<Vector> warm_start;
    std::optional<Vector> offset;  // added to the linear predictor
    bool record_objective = false;
};

/// Penalized M-estimator with loss neg_log_likelihood over the columns of X.
/// Gaussian families use coordinate descent directly; GLMs use proximal Newton
/// with a coordinate-descent inner solver and backtracking.
PenalizedFit fit_penalized(const Matrix& X, const Vector& y, const ModelFamily& family,
                           const PenaltyConfig& penalty, const SolverConfig& cfg = {},
                           const FitOptions& opts = {});

PenalizedFit fit_lasso(const Dataset& data, const ModelFamily& family, const PenaltyConfig& penalty,
                       const SolverConfig& cfg = {}, const FitOptions& opts = {});

/// minimizes (1/n) sum_i weights_i (target_i - x_i^T w)^2 + lambda ||w||_1
PenalizedFit fit_weighted_lasso(const Matrix& regressors, const Vector& target, const Vector& weights,
                                double lambda, const SolverConfig& cfg = {},
                                const std::optional<Vector>& warm_start = std::nullopt);

/// minimizes 0.5 w^T A w - b^T w + lambda ||w||_1 for symmetric PSD A
PenalizedFit fit_quadratic_lasso(const Matrix& A, const Vector& b, double lambda, const SolverConfig& cfg = {});

struct DantzigOptions {
    int max_iter = 200;
    double tol = 1e-7;
};

struct DantzigFit {
    Vector w;
    double lambda_prime = 0.0;
    double feasibility_gap = 0.0;  // ||b - A w||_inf
    double duality_gap = 0.0;
    bool converged = false;
    int iterations = 0;
};

/// min ||w||_1 subject to ||b - A w||_inf <= lambda_prime, via a primal-dual
/// interior-point method on the linear-programming form. Throws Infeasible
/// when no w meets the constraint.
DantzigFit fit_dantzig(const Matrix& A, const Vector& b, double lambda_prime, const DantzigOptions& opts = {});

struct ScaledLassoFit {
    PenalizedFit fit;
    double sigma = 0.0;
    int outer_iterations = 0;
};

/// Joint minimizer of (1/(2 sigma n)) ||y - Q beta||^2 + sigma / 2 + lambda ||beta||_1.
ScaledLassoFit fit_scaled_lasso(const Dataset& data, double lambda, const SolverConfig& cfg = {});

/// Fold label in [0, folds) for each observation; a function of (n, folds, seed) only.
std::vector<int> fold_assignment(Index n, int folds, std::uint64_t seed);

/// Log-spaced grid from lambda_max = ||grad loss(0)||_inf down to ratio * lambda_max.
std::vector<double> default_lambda_grid(const Matrix& X, const Vector& y, const ModelFamily& family,
                                        const std::optional<Vector>& offset = std::nullopt,
                                        int count = 50, double ratio = 0.01);

struct CrossValidation {
    double lambda = 0.0;
    std::vector<double> grid;   // descending
    std::vector<double> curve;  // pooled held-out mean loss per grid point
};

/// K-fold CV on pooled held-out negative log-likelihood; ties go to the larger lambda.
CrossValidation cross_validate(const Matrix& X, const Vector& y, const ModelFamily& family,
                               const PenaltyConfig& penalty, std::vector<double> grid, int folds,
                               std::uint64_t seed, const SolverConfig& cfg = {},
                               const std::optional<Vector>& offset = std::nullopt);

double cross_validate_lambda(const Dataset& data, const ModelFamily& family, const std::vector<double>& grid,
                             int folds, std::uint64_t seed, const PenaltyConfig& penalty = {},
                             const SolverConfig& cfg = {});

/// c * sqrt(log d / n)
double lambda_prime_rule(Index n, Index d, double c = 0.5);

/// Subgradient optimality residual of an L1 fit to fit_penalized's objective:
/// the largest violation of |grad_j| <= lambda (zero coordinates) or
/// grad_j = -lambda sign(beta_j) (active coordinates).
double lasso_kkt_violation(const Matrix& X, const Vector& y, const ModelFamily& family, const Vector& beta,
                           double lambda, const std::optional<Vector>& offset = std::nullopt);

}  // namespace descore
