#include "descore/decorrelate.hpp"

#include <algorithm>
#include <cmath>

#include "descore/errors.hpp"

namespace descore {

DirectionMethod direction_method_from_name(const std::string& name) {
    if (name == "dantzig") return DirectionMethod::Dantzig;
    if (name == "lasso" || name == "lasso-quadratic") return DirectionMethod::LassoQuadratic;
    if (name == "lasso-residual") return DirectionMethod::LassoResidual;
    throw InvalidArgument("unknown direction method '" + name + "'");
}

std::string direction_method_name(DirectionMethod m) {
    switch (m) {
        case DirectionMethod::Dantzig: return "dantzig";
        case DirectionMethod::LassoQuadratic: return "lasso-quadratic";
        case DirectionMethod::LassoResidual: return "lasso-residual";
    }
    return "unknown";
}

namespace {

Vector direction_weights(const Dataset& data, const ModelFamily& family, const Vector& eta, DirectionMethod method) {
    const Index n = data.n();
    Vector w(n);
    if (method == DirectionMethod::LassoResidual) {
        for (Index i = 0; i < n; ++i) {
            double r = data.y()(i) - family.b1(eta(i));
            w(i) = r * r;
        }
        if (w.maxCoeff() <= 0.0) throw DegenerateProblem("all residuals are zero; residual-weighted direction undefined");
    } else if (family.is_gaussian()) {
        w.setOnes();
    } else {
        for (Index i = 0; i < n; ++i) w(i) = family.b2(eta(i));
    }
    return w;
}

double shared_cv_lambda_prime(const Matrix& X, const Matrix& Z, const Vector& weights, const TuningPolicy& tuning,
                              const SolverConfig& cfg) {
    // (1/n) sum w (z - x b)^2 is the Gaussian loss with sigma^2 = 1/2 on sqrt(w)-scaled data.
    Vector sw = weights.cwiseSqrt();
    Matrix Xs = sw.asDiagonal() * X;
    const ModelFamily half = ModelFamily::gaussian(0.5);
    double lmax = 0.0;
    for (Index j = 0; j < Z.cols(); ++j) {
        Vector zj = sw.cwiseProduct(Z.col(j));
        lmax = std::max(lmax, default_lambda_grid(Xs, zj, half, std::nullopt, 1).front());
    }
    std::vector<double> grid(50);
    for (std::size_t k = 0; k < grid.size(); ++k)
        grid[k] = lmax * std::pow(0.01, static_cast<double>(k) / 49.0);
    std::vector<double> total(grid.size(), 0.0);
    for (Index j = 0; j < Z.cols(); ++j) {
        Vector zj = sw.cwiseProduct(Z.col(j));
        CrossValidation cv = cross_validate(Xs, zj, half, PenaltyConfig::l1(0.0), grid, tuning.folds,
                                            tuning.seed + 7919u * static_cast<std::uint64_t>(j + 1), cfg);
        for (std::size_t k = 0; k < grid.size(); ++k) total[k] += cv.curve[k];
    }
    std::size_t best = 0;
    for (std::size_t k = 1; k < grid.size(); ++k)
        if (total[k] < total[best]) best = k;
    return 0.5 * grid[best];
}

}  // namespace

Matrix estimate_direction(const Dataset& data, const ModelFamily& family, const Vector& beta_hat,
                          DirectionMethod method, double lambda_prime, const SolverConfig& cfg) {
    if (!beta_hat.allFinite()) throw DataError("direction: beta_hat has non-finite entries");
    if (!(lambda_prime >= 0.0)) throw InvalidArgument("direction: lambda' must be >= 0");
    const Index m = static_cast<Index>(data.nuisance().size());
    const Index d0 = data.d0();
    Matrix W = Matrix::Zero(m, d0);
    if (m == 0) return W;

    Vector eta = linear_predictor(data, beta_hat);
    Matrix X = data.nuisance_columns();
    Matrix Z = data.interest_columns();
    const Index n = data.n();

    if (method == DirectionMethod::Dantzig) {
        Vector wq = direction_weights(data, family, eta, DirectionMethod::LassoQuadratic);
        Matrix WX = wq.asDiagonal() * X;
        Matrix A = X.transpose() * WX / static_cast<double>(n);
        A = 0.5 * (A + A.transpose());
        Matrix B = WX.transpose() * Z / static_cast<double>(n);
        for (Index j = 0; j < d0; ++j) W.col(j) = fit_dantzig(A, B.col(j), lambda_prime).w;
        return W;
    }

    // Penalty 2 lambda' puts the lasso KKT bound on the same scale as the Dantzig constraint.
    Vector wts = direction_weights(data, family, eta, method);
    for (Index j = 0; j < d0; ++j) W.col(j) = fit_weighted_lasso(X, Z.col(j), wts, 2.0 * lambda_prime, cfg).beta;
    return W;
}

Matrix decorrelated_score_rows(const Dataset& data, const ModelFamily& family, const Vector& beta_eval, const Matrix& w) {
    const Index m = static_cast<Index>(data.nuisance().size());
    if (w.rows() != m || w.cols() != data.d0()) throw DimensionMismatch("direction matrix has the wrong shape");
    Vector g = gradient_factors(data, family, linear_predictor(data, beta_eval));
    Matrix R = data.interest_columns();
    if (m > 0) R.noalias() -= data.nuisance_columns() * w;
    return g.asDiagonal() * R;
}

Vector decorrelated_score(const Dataset& data, const ModelFamily& family, const Vector& theta_null,
                          const Vector& gamma_hat, const Matrix& w) {
    Vector beta = data.assemble(theta_null, gamma_hat);
    return decorrelated_score_rows(data, family, beta, w).colwise().mean().transpose();
}

Matrix partial_information(const Dataset& data, const ModelFamily& family, const Vector& beta_eval, const Matrix& w) {
    const Index m = static_cast<Index>(data.nuisance().size());
    if (w.rows() != m || w.cols() != data.d0()) throw DimensionMismatch("direction matrix has the wrong shape");
    Vector c = curvature_weights(family, linear_predictor(data, beta_eval));
    Matrix Z = data.interest_columns();
    Matrix R = Z;
    if (m > 0) R.noalias() -= data.nuisance_columns() * w;
    Matrix I = Z.transpose() * c.asDiagonal() * R / static_cast<double>(data.n());
    return 0.5 * (I + I.transpose());
}

namespace {

void fill_scores(const Dataset& data, const ModelFamily& family, DecorrelatedFit& fit) {
    fit.per_obs = decorrelated_score_rows(data, family, fit.beta_null, fit.w);
    fit.s_hat = fit.per_obs.colwise().mean().transpose();
    if (fit.beta_null == fit.beta_hat)
        fit.s_at_estimate = fit.s_hat;
    else
        fit.s_at_estimate = decorrelated_score_rows(data, family, fit.beta_hat, fit.w).colwise().mean().transpose();
    fit.info_hat = partial_information(data, family, fit.beta_hat, fit.w);
    fit.info_positive = (fit.info_hat.diagonal().array() > 1e-10).all();
}

}  // namespace

DecorrelatedFit build_decorrelated_fit(const Dataset& data, const ModelFamily& family, const PenaltyConfig& penalty,
                                       DirectionMethod method, const TuningPolicy& tuning, NuisanceSource source,
                                       const std::optional<Vector>& theta_null, const SolverConfig& cfg) {
    const Index d0 = data.d0();
    Vector th0 = theta_null ? *theta_null : Vector::Zero(d0);
    if (th0.size() != d0) throw DimensionMismatch("theta_null length must equal the number of interest coordinates");

    Matrix X;
    std::optional<Vector> offset;
    if (source == NuisanceSource::FullFit) {
        X = data.Q();
    } else {
        X = data.nuisance_columns();
        offset = data.interest_columns() * th0;
    }

    DecorrelatedFit fit;
    fit.method = method;
    fit.nuisance_source = source;
    fit.theta_null = th0;

    if (tuning.lambda) {
        fit.lambda = *tuning.lambda;
    } else if (X.cols() == 0) {
        fit.lambda = 0.0;
    } else {
        std::vector<double> grid = tuning.lambda_grid.empty() ? default_lambda_grid(X, data.y(), family, offset)
                                                              : tuning.lambda_grid;
        fit.lambda = cross_validate(X, data.y(), family, penalty, grid, tuning.folds, tuning.seed, cfg, offset).lambda;
    }

    if (X.cols() > 0) {
        FitOptions opts;
        opts.offset = offset;
        PenalizedFit pf = fit_penalized(X, data.y(), family, penalty.with_lambda(fit.lambda), cfg, opts);
        fit.fit_converged = pf.converged;
        fit.beta_hat = source == NuisanceSource::FullFit ? pf.beta : data.assemble(th0, pf.beta);
    } else {
        fit.beta_hat = data.assemble(th0, Vector::Zero(0));
    }

    if (tuning.lambda_prime) {
        fit.lambda_prime = *tuning.lambda_prime;
    } else if (tuning.cv_lambda_prime && !data.nuisance().empty()) {
        Vector eta = linear_predictor(data, fit.beta_hat);
        DirectionMethod wm = method == DirectionMethod::LassoResidual ? method : DirectionMethod::LassoQuadratic;
        fit.lambda_prime = shared_cv_lambda_prime(data.nuisance_columns(), data.interest_columns(),
                                                  direction_weights(data, family, eta, wm), tuning, cfg);
    } else {
        fit.lambda_prime = lambda_prime_rule(data.n(), data.d(), tuning.lambda_prime_c);
    }

    fit.w = estimate_direction(data, family, fit.beta_hat, method, fit.lambda_prime, cfg);
    fit.theta_hat = data.theta_of(fit.beta_hat);
    fit.beta_null = data.assemble(th0, data.gamma_of(fit.beta_hat));
    fill_scores(data, family, fit);
    return fit;
}

DecorrelatedFit reevaluate_fit(const Dataset& data, const ModelFamily& family, const DecorrelatedFit& fit) {
    DecorrelatedFit out = fit;
    fill_scores(data, family, out);
    return out;
}

}  // namespace descore
