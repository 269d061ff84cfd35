#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "descore/model.hpp"
#include "descore/penalties.hpp"
#include "descore/solvers.hpp"

namespace descore {

enum class DirectionMethod { Dantzig, LassoQuadratic, LassoResidual };
enum class NuisanceSource { FullFit, NullConstrainedFit };

DirectionMethod direction_method_from_name(const std::string& name);
std::string direction_method_name(DirectionMethod m);

/// Direction matrix W, one column per interest coordinate (nuisance x d0).
///   Dantzig:        min ||w||_1  s.t. ||H_{gamma theta_j} - H_{gamma gamma} w||_inf <= lambda'
///   LassoQuadratic: weighted lasso of Z_j on X with weights b''(eta_i)
///   LassoResidual:  weighted lasso of Z_j on X with weights (y_i - b'(eta_i))^2
/// The weighted forms minimize (1/n) sum w_i (Z_ij - x_i^T w)^2 + 2 lambda' ||w||_1, whose
/// optimality conditions bound the same residual as the Dantzig constraint.
/// Gaussian families use unit curvature so W does not depend on sigma^2.
Matrix estimate_direction(const Dataset& data, const ModelFamily& family, const Vector& beta_hat,
                          DirectionMethod method, double lambda_prime, const SolverConfig& cfg = {});

/// grad_theta l(theta, gamma) - W^T grad_gamma l(theta, gamma)
Vector decorrelated_score(const Dataset& data, const ModelFamily& family, const Vector& theta_null,
                          const Vector& gamma_hat, const Matrix& w);

/// Per-observation decorrelated score rows (n x d0); their mean is decorrelated_score.
Matrix decorrelated_score_rows(const Dataset& data, const ModelFamily& family, const Vector& beta_eval,
                               const Matrix& w);

/// H_theta_theta - W^T H_gamma_theta at beta_eval, symmetrized.
Matrix partial_information(const Dataset& data, const ModelFamily& family, const Vector& beta_eval,
                           const Matrix& w);

struct TuningPolicy {
    std::optional<double> lambda;        // fixed lambda; cross-validated when empty
    std::vector<double> lambda_grid;     // empty: default_lambda_grid
    int folds = 10;
    std::uint64_t seed = 0;
    std::optional<double> lambda_prime;  // fixed lambda'; rule or CV when empty
    double lambda_prime_c = 0.5;
    bool cv_lambda_prime = false;
};

struct DecorrelatedFit {
    Matrix w;             // (d - d0) x d0
    Vector s_hat;         // score at (theta_null, gamma_hat)
    Matrix info_hat;      // d0 x d0
    Vector theta_null;
    DirectionMethod method = DirectionMethod::LassoQuadratic;
    NuisanceSource nuisance_source = NuisanceSource::FullFit;

    Vector beta_hat;      // penalized estimate (theta_null, gamma0) for the null-constrained path
    Vector beta_null;     // (theta_null, gamma_hat): evaluation point of s_hat
    Vector s_at_estimate; // score at beta_hat, used by the one-step estimator
    Matrix per_obs;       // n x d0 rows at beta_null
    double lambda = 0.0;
    double lambda_prime = 0.0;
    bool fit_converged = true;
    bool info_positive = true;

    Vector theta_hat;     // interest block of beta_hat

    Index d0() const { return s_hat.size(); }
};

DecorrelatedFit build_decorrelated_fit(const Dataset& data, const ModelFamily& family, const PenaltyConfig& penalty,
                                       DirectionMethod method, const TuningPolicy& tuning,
                                       NuisanceSource source = NuisanceSource::FullFit,
                                       const std::optional<Vector>& theta_null = std::nullopt,
                                       const SolverConfig& cfg = {});

/// Recompute score, rows and information for another family, keeping beta_hat and W.
DecorrelatedFit reevaluate_fit(const Dataset& data, const ModelFamily& family, const DecorrelatedFit& fit);

}  // namespace descore
