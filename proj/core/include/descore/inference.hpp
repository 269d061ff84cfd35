#pragma once

#include <functional>
#include <optional>
#include <string>

#include "descore/decorrelate.hpp"
#include "descore/model.hpp"

namespace descore {

enum class Alternative { TwoSided, Greater, Less };
enum class VarianceKind { ModelInfo, PluginSigma, Sandwich, GeneralizedSandwich };

Alternative alternative_from_name(const std::string& name);
std::string alternative_name(Alternative a);
std::string variance_kind_name(VarianceKind v);

struct TestResult {
    double statistic = 0.0;
    double p_value = 1.0;
    bool reject = false;
    double alpha = 0.05;
    Alternative alternative = Alternative::TwoSided;
    VarianceKind variance_kind = VarianceKind::ModelInfo;
};

/// p-value of a standard-normal statistic. The score is the gradient of the
/// negative log-likelihood, so evidence for theta > theta_null makes it negative:
/// Greater uses Phi(U), Less uses Phi(-U).
double p_value_for(double statistic, Alternative alt);

/// Packages a statistic with its p-value; reject iff p < alpha.
TestResult make_result(double statistic, double alpha, Alternative alt, VarianceKind kind);

/// U = sqrt(n) S / sqrt(I).
TestResult score_test(const DecorrelatedFit& fit, Index n, double alpha = 0.05,
                      Alternative alt = Alternative::TwoSided);

/// Residual-variance estimate (1/n) ||y - Q beta||^2.
double residual_variance(const Dataset& data, const Vector& beta);

/// Gaussian statistic with sigma^2 replaced by the residual variance at fit.beta_hat.
TestResult score_test_unknown_sigma(const Dataset& data, const DecorrelatedFit& fit, double alpha = 0.05,
                                    Alternative alt = Alternative::TwoSided);

struct OneStepEstimate {
    double theta_tilde = 0.0;
    double std_err = 0.0;  // I^{-1/2}; the interval half-width is z * std_err / sqrt(n)
    double ci_lower = 0.0;
    double ci_upper = 0.0;
    double level = 0.95;
};

OneStepEstimate one_step(const DecorrelatedFit& fit, Index n, double level = 0.95);

/// sum (y - gamma^T X)(Z - w^T X) / sum Z (Z - w^T X) for the Gaussian linear model.
double one_step_linear_closed_form(const Dataset& data, const Vector& gamma_hat, const Vector& w);

/// (1/n) sum_i g_i g_i^T for the rows g_i of grads.
Matrix outer_product_covariance(const Matrix& grads);

struct SandwichPieces {
    Matrix sigma_mat;  // d x d
    Vector v_hat;      // (1, -w) placed at (interest, nuisance) positions
    double quad_form = 0.0;
};

/// Sigma = (1/n) sum grad l_i grad l_i^T at `point` (default beta_hat). For the
/// Gaussian family this is (1/(sigma^4 n)) sum Q_i Q_i^T r_i^2.
SandwichPieces sandwich_pieces(const Dataset& data, const ModelFamily& family, const DecorrelatedFit& fit,
                               const std::optional<Vector>& point = std::nullopt, bool full_matrix = true);

TestResult sandwich_test(const Dataset& data, const ModelFamily& family, const DecorrelatedFit& fit,
                         double alpha = 0.05, Alternative alt = Alternative::TwoSided);

struct GeneralLoss {
    /// n x d matrix of per-observation loss gradients at beta.
    std::function<Matrix(const Vector&)> per_obs_gradient;
    /// Hessian of the mean loss; central differences of the mean gradient when empty.
    std::function<Matrix(const Vector&)> hessian;
};

struct GeneralizedFitPieces {
    Vector beta_hat;
    double theta_null = 0.0;
    std::optional<Vector> w;  // estimated from the Hessian when empty
    double lambda_prime = 0.0;
    DirectionMethod method = DirectionMethod::LassoQuadratic;
    std::optional<Vector> sigma_point;  // default (theta_null, gamma_hat)
};

struct GeneralizedTestResult {
    TestResult test;
    double s_hat = 0.0;
    double quad_form = 0.0;
    Vector w;
};

/// Loss-agnostic sandwich score test for a single interest coordinate.
GeneralizedTestResult generalized_score_test(const GeneralLoss& loss, const Dataset& data,
                                             const GeneralizedFitPieces& pieces, double alpha = 0.05,
                                             Alternative alt = Alternative::TwoSided);

Matrix finite_difference_hessian(const std::function<Matrix(const Vector&)>& per_obs_gradient, const Vector& beta);

struct TruncatedOptions {
    double lambda_prime = 0.0;
    bool empirical = false;  // least-squares projection on the selected columns
    Alternative alternative = Alternative::TwoSided;
};

struct TruncatedTestResult {
    TestResult test;
    IndexList support;  // nuisance columns (indices into Q) with nonzero beta_hat
    Vector v;
    double s_tc = 0.0;
    double info = 0.0;
};

/// Score test that projects only on the nuisance columns selected by beta_hat.
TruncatedTestResult truncated_score_test(const Dataset& data, const Vector& beta_hat, double sigma2,
                                         double alpha = 0.05, const TruncatedOptions& opts = {},
                                         double theta_null = 0.0);

/// Asymptotic power at local alternative c / sqrt(n) with partial information `info`.
double local_power(double alpha, double c_tilde, double info, Alternative alt = Alternative::TwoSided);

}  // namespace descore
