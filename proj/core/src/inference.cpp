#include "descore/inference.hpp"

#include <cmath>

#include "descore/errors.hpp"
#include "descore/normal.hpp"
#include "descore/solvers.hpp"

namespace descore {

namespace {

constexpr double kInfoFloor = 1e-10;

void require_single(Index d0, const char* what) {
    if (d0 != 1) throw InvalidArgument(std::string(what) + " requires exactly one interest coordinate");
}

double checked_info(double info) {
    if (!(info > kInfoFloor))
        throw NonPositiveInformation("estimated partial information " + std::to_string(info) + " is not positive");
    return info;
}

}  // namespace

Alternative alternative_from_name(const std::string& name) {
    if (name == "two-sided") return Alternative::TwoSided;
    if (name == "greater") return Alternative::Greater;
    if (name == "less") return Alternative::Less;
    throw InvalidArgument("unknown alternative '" + name + "'");
}

std::string alternative_name(Alternative a) {
    switch (a) {
        case Alternative::TwoSided: return "two-sided";
        case Alternative::Greater: return "greater";
        case Alternative::Less: return "less";
    }
    return "unknown";
}

std::string variance_kind_name(VarianceKind v) {
    switch (v) {
        case VarianceKind::ModelInfo: return "model_info";
        case VarianceKind::PluginSigma: return "plugin_sigma";
        case VarianceKind::Sandwich: return "sandwich";
        case VarianceKind::GeneralizedSandwich: return "generalized_sandwich";
    }
    return "unknown";
}

double p_value_for(double statistic, Alternative alt) {
    switch (alt) {
        case Alternative::TwoSided: return std::erfc(std::abs(statistic) / std::sqrt(2.0));
        case Alternative::Greater: return normal_cdf(statistic);
        case Alternative::Less: return normal_cdf(-statistic);
    }
    return 1.0;
}

TestResult make_result(double statistic, double alpha, Alternative alt, VarianceKind kind) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in (0, 1)");
    if (!std::isfinite(statistic)) throw NumericalError("test statistic is not finite");
    TestResult r;
    r.statistic = statistic;
    r.p_value = std::min(1.0, p_value_for(statistic, alt));
    r.reject = r.p_value < alpha;
    r.alpha = alpha;
    r.alternative = alt;
    r.variance_kind = kind;
    return r;
}

TestResult score_test(const DecorrelatedFit& fit, Index n, double alpha, Alternative alt) {
    require_single(fit.d0(), "score_test");
    double info = checked_info(fit.info_hat(0, 0));
    double u = std::sqrt(static_cast<double>(n)) * fit.s_hat(0) / std::sqrt(info);
    return make_result(u, alpha, alt, VarianceKind::ModelInfo);
}

double residual_variance(const Dataset& data, const Vector& beta) {
    return (data.y() - linear_predictor(data, beta)).squaredNorm() / static_cast<double>(data.n());
}

TestResult score_test_unknown_sigma(const Dataset& data, const DecorrelatedFit& fit, double alpha, Alternative alt) {
    require_single(data.d0(), "score_test_unknown_sigma");
    const double n = static_cast<double>(data.n());
    double s2 = residual_variance(data, fit.beta_hat);
    Vector yc = data.y().array() - data.y().mean();
    double var_y = yc.squaredNorm() / n;
    if (!(s2 > 0.0) || s2 < 1e-12 * var_y)
        throw DegenerateResidualVariance("residual variance " + std::to_string(s2) + " is below the degeneracy floor");

    Vector z = data.interest_columns().col(0);
    Vector dz = z;
    if (!data.nuisance().empty()) dz.noalias() -= data.nuisance_columns() * fit.w.col(0);
    Vector r = data.y() - linear_predictor(data, fit.beta_null);
    double h = checked_info(z.dot(dz) / n);
    double u = -r.dot(dz) / (std::sqrt(s2) * std::sqrt(n)) / std::sqrt(h);
    return make_result(u, alpha, alt, VarianceKind::PluginSigma);
}

OneStepEstimate one_step(const DecorrelatedFit& fit, Index n, double level) {
    require_single(fit.d0(), "one_step");
    if (!(level > 0.0 && level < 1.0)) throw InvalidArgument("confidence level must lie in (0, 1)");
    double info = checked_info(fit.info_hat(0, 0));
    OneStepEstimate est;
    est.theta_tilde = fit.theta_hat(0) - fit.s_at_estimate(0) / info;
    est.std_err = 1.0 / std::sqrt(info);
    double half = normal_quantile(1.0 - 0.5 * (1.0 - level)) * est.std_err / std::sqrt(static_cast<double>(n));
    est.ci_lower = est.theta_tilde - half;
    est.ci_upper = est.theta_tilde + half;
    est.level = level;
    return est;
}

double one_step_linear_closed_form(const Dataset& data, const Vector& gamma_hat, const Vector& w) {
    require_single(data.d0(), "one_step_linear_closed_form");
    Vector z = data.interest_columns().col(0);
    Vector r = data.y();
    Vector dz = z;
    if (!data.nuisance().empty()) {
        Matrix X = data.nuisance_columns();
        r.noalias() -= X * gamma_hat;
        dz.noalias() -= X * w;
    }
    double den = z.dot(dz);
    if (!(den > 0.0)) throw NonPositiveInformation("closed-form one-step denominator is not positive");
    return r.dot(dz) / den;
}

Matrix outer_product_covariance(const Matrix& grads) {
    return grads.transpose() * grads / static_cast<double>(grads.rows());
}

SandwichPieces sandwich_pieces(const Dataset& data, const ModelFamily& family, const DecorrelatedFit& fit,
                               const std::optional<Vector>& point, bool full_matrix) {
    require_single(fit.d0(), "sandwich_pieces");
    SandwichPieces sp;
    sp.v_hat = Vector::Zero(data.d());
    sp.v_hat(data.interest()[0]) = 1.0;
    for (std::size_t k = 0; k < data.nuisance().size(); ++k)
        sp.v_hat(data.nuisance()[k]) = -fit.w(static_cast<Index>(k), 0);
    Matrix G = per_observation_gradients(data, family, point ? *point : fit.beta_hat);
    if (full_matrix) sp.sigma_mat = outer_product_covariance(G);
    sp.quad_form = (G * sp.v_hat).squaredNorm() / static_cast<double>(data.n());
    return sp;
}

TestResult sandwich_test(const Dataset& data, const ModelFamily& family, const DecorrelatedFit& fit, double alpha,
                         Alternative alt) {
    SandwichPieces sp = sandwich_pieces(data, family, fit, std::nullopt, false);
    if (!(sp.quad_form > 0.0)) throw DegenerateProblem("sandwich variance is zero");
    double u = std::sqrt(static_cast<double>(data.n())) * fit.s_hat(0) / std::sqrt(sp.quad_form);
    return make_result(u, alpha, alt, VarianceKind::Sandwich);
}

Matrix finite_difference_hessian(const std::function<Matrix(const Vector&)>& per_obs_gradient, const Vector& beta) {
    const Index d = beta.size();
    Matrix H(d, d);
    for (Index j = 0; j < d; ++j) {
        double h = 1e-5 * std::max(1.0, std::abs(beta(j)));
        Vector up = beta, dn = beta;
        up(j) += h;
        dn(j) -= h;
        Vector gu = per_obs_gradient(up).colwise().mean().transpose();
        Vector gd = per_obs_gradient(dn).colwise().mean().transpose();
        H.col(j) = (gu - gd) / (2.0 * h);
    }
    return 0.5 * (H + H.transpose());
}

GeneralizedTestResult generalized_score_test(const GeneralLoss& loss, const Dataset& data,
                                             const GeneralizedFitPieces& pieces, double alpha, Alternative alt) {
    require_single(data.d0(), "generalized_score_test");
    if (!loss.per_obs_gradient) throw InvalidArgument("generalized_score_test needs a gradient callback");
    if (pieces.beta_hat.size() != data.d()) throw DimensionMismatch("beta_hat has the wrong length");
    const Index idx = data.interest()[0];
    const IndexList& nui = data.nuisance();
    const Index m = static_cast<Index>(nui.size());

    GeneralizedTestResult out;
    if (pieces.w) {
        if (pieces.w->size() != m) throw DimensionMismatch("direction has the wrong length");
        out.w = *pieces.w;
    } else if (m == 0) {
        out.w = Vector::Zero(0);
    } else {
        Matrix H = loss.hessian ? loss.hessian(pieces.beta_hat)
                                : finite_difference_hessian(loss.per_obs_gradient, pieces.beta_hat);
        Matrix A = H(nui, nui);
        Vector b = H(nui, IndexList{idx}).col(0);
        if (pieces.method == DirectionMethod::Dantzig)
            out.w = fit_dantzig(A, b, pieces.lambda_prime).w;
        else
            out.w = fit_quadratic_lasso(A, b, pieces.lambda_prime).beta;
    }

    Vector v = Vector::Zero(data.d());
    v(idx) = 1.0;
    for (Index k = 0; k < m; ++k) v(nui[static_cast<std::size_t>(k)]) = -out.w(k);

    Vector beta_null = pieces.beta_hat;
    beta_null(idx) = pieces.theta_null;
    Matrix G = loss.per_obs_gradient(beta_null);
    if (G.rows() != data.n() || G.cols() != data.d()) throw DimensionMismatch("gradient callback returned the wrong shape");
    out.s_hat = (G * v).mean();
    Matrix G2 = pieces.sigma_point ? loss.per_obs_gradient(*pieces.sigma_point) : G;
    out.quad_form = (G2 * v).squaredNorm() / static_cast<double>(G2.rows());
    if (!(out.quad_form > 0.0)) throw DegenerateProblem("generalized sandwich variance is zero");
    double u = std::sqrt(static_cast<double>(data.n())) * out.s_hat / std::sqrt(out.quad_form);
    out.test = make_result(u, alpha, alt, VarianceKind::GeneralizedSandwich);
    return out;
}

TruncatedTestResult truncated_score_test(const Dataset& data, const Vector& beta_hat, double sigma2, double alpha,
                                         const TruncatedOptions& opts, double theta_null) {
    require_single(data.d0(), "truncated_score_test");
    if (!(sigma2 > 0.0)) throw InvalidArgument("truncated_score_test needs sigma2 > 0");
    if (beta_hat.size() != data.d()) throw DimensionMismatch("beta_hat has the wrong length");
    const double n = static_cast<double>(data.n());
    const Index idx = data.interest()[0];

    TruncatedTestResult out;
    for (Index j : data.nuisance())
        if (beta_hat(j) != 0.0) out.support.push_back(j);

    Vector z = data.Q().col(idx);
    Vector dz = z;
    if (!out.support.empty()) {
        Matrix XS = select_columns(data.Q(), out.support);
        if (opts.empirical) {
            Matrix G = XS.transpose() * XS;
            Eigen::ColPivHouseholderQR<Matrix> qr(G);
            if (qr.rank() < G.cols()) throw RankDeficient("selected nuisance columns are collinear");
            out.v = qr.solve(XS.transpose() * z);
        } else {
            Matrix A = XS.transpose() * XS / n;
            A = 0.5 * (A + A.transpose());
            out.v = fit_dantzig(A, XS.transpose() * z / n, opts.lambda_prime).w;
        }
        dz.noalias() -= XS * out.v;
    } else {
        out.v = Vector::Zero(0);
    }

    Vector beta_null = beta_hat;
    beta_null(idx) = theta_null;
    Vector r = data.y() - data.Q() * beta_null;
    out.s_tc = -r.dot(dz) / (sigma2 * n);
    out.info = checked_info(z.dot(dz) / (sigma2 * n));
    double u = std::sqrt(n) * out.s_tc / std::sqrt(out.info);
    out.test = make_result(u, alpha, opts.alternative, VarianceKind::ModelInfo);
    return out;
}

double local_power(double alpha, double c_tilde, double info, Alternative alt) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in (0, 1)");
    if (!(info > 0.0)) throw InvalidArgument("information must be positive");
    const double shift = c_tilde * std::sqrt(info);
    if (shift == 0.0) return alpha;
    switch (alt) {
        case Alternative::TwoSided: {
            const double z = normal_quantile(1.0 - 0.5 * alpha);
            return normal_sf(z + shift) + normal_cdf(-z + shift);
        }
        case Alternative::Greater: return normal_sf(normal_quantile(1.0 - alpha) - shift);
        case Alternative::Less: return normal_sf(normal_quantile(1.0 - alpha) + shift);
    }
    return alpha;
}

}  // namespace descore
