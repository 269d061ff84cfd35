#include "descore/solvers.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "coordinate_descent.hpp"
#include "descore/errors.hpp"

namespace descore {

void SolverConfig::validate() const {
    if (max_iter < 1) throw InvalidArgument("solver max_iter must be >= 1");
    if (!(tol > 0.0)) throw InvalidArgument("solver tol must be > 0");
}

double lambda_prime_rule(Index n, Index d, double c) {
    if (n < 1) throw InvalidArgument("lambda_prime_rule: n must be positive");
    return c * std::sqrt(std::log(static_cast<double>(std::max<Index>(d, 2))) / static_cast<double>(n));
}

namespace {

double penalty_sum(const PenaltyConfig& pen, const Vector& beta) {
    double s = 0.0;
    for (Index j = 0; j < beta.size(); ++j) s += penalty_value(pen, beta(j));
    return s;
}

double glm_loss(const ModelFamily& family, const Vector& y, const Vector& eta) {
    double s = 0.0;
    for (Index i = 0; i < eta.size(); ++i) s += family.b(eta(i)) - y(i) * eta(i);
    return s / static_cast<double>(eta.size());
}

Vector column_scales(const Matrix& X) {
    Vector s(X.cols());
    for (Index j = 0; j < X.cols(); ++j) {
        double v = std::sqrt(X.col(j).squaredNorm() / static_cast<double>(X.rows()));
        s(j) = v > 0.0 ? v : 1.0;
    }
    return s;
}

PenalizedFit fit_gaussian(const Matrix& X, const Vector& y, const ModelFamily& family,
                          const PenaltyConfig& pen, const SolverConfig& cfg, const FitOptions& opts) {
    const Index n = X.rows();
    const double w = family.scale();
    Vector beta = opts.warm_start ? *opts.warm_start : Vector::Zero(X.cols());
    Vector a = opts.offset ? Vector(y - *opts.offset) : y;
    Vector u = w * (a - X * beta);
    Matrix WX = w * X;
    Vector curv = w * X.colwise().squaredNorm().transpose() / static_cast<double>(n);

    PenalizedFit fit;
    auto objective = [&]() { return 0.5 * u.squaredNorm() / (w * static_cast<double>(n)) + penalty_sum(pen, beta); };
    std::function<void()> hook;
    if (opts.record_objective) {
        fit.objective_trace.push_back(objective());
        hook = [&]() { fit.objective_trace.push_back(objective()); };
    }
    auto res = detail::coordinate_descent(X, WX, curv, pen, beta, u, cfg.max_iter, cfg.tol, cfg.active_set, hook);
    fit.beta = std::move(beta);
    fit.iterations = res.sweeps;
    fit.converged = res.converged;
    fit.objective = objective();
    return fit;
}

PenalizedFit fit_glm(const Matrix& X, const Vector& y, const ModelFamily& family, const PenaltyConfig& pen,
                     const SolverConfig& cfg, const FitOptions& opts) {
    const Index n = X.rows();
    const Index d = X.cols();
    Vector offset = opts.offset ? *opts.offset : Vector::Zero(n);
    Vector beta = opts.warm_start ? *opts.warm_start : Vector::Zero(d);
    Vector eta = X * beta + offset;
    double F = glm_loss(family, y, eta) + penalty_sum(pen, beta);

    PenalizedFit fit;
    if (opts.record_objective) fit.objective_trace.push_back(F);
    const double inner_tol = 0.1 * cfg.tol;
    Matrix WX(n, d);
    for (int it = 1; it <= cfg.max_iter; ++it) {
        fit.iterations = it;
        Vector mu(n), wts(n);
        for (Index i = 0; i < n; ++i) {
            mu(i) = family.b1(eta(i));
            wts(i) = std::max(family.b2(eta(i)), 1e-10);
        }
        WX = wts.asDiagonal() * X;
        Vector curv = (X.array() * WX.array()).colwise().sum().transpose() / static_cast<double>(n);
        Vector u = y - mu;
        Vector cand = beta;
        detail::coordinate_descent(X, WX, curv, pen, cand, u, cfg.max_iter, inner_tol, cfg.active_set);
        Vector delta = cand - beta;
        if (delta.lpNorm<Eigen::Infinity>() < cfg.tol) {
            fit.converged = true;
            break;
        }

        Vector grad = X.transpose() * (mu - y) / static_cast<double>(n);
        double P0 = penalty_sum(pen, beta);
        double descent = grad.dot(delta) + penalty_sum(pen, cand) - P0;
        Vector Xdelta = X * delta;
        double t = 1.0;
        bool accepted = false;
        for (int ls = 0; ls < 40; ++ls, t *= 0.5) {
            Vector trial = beta + t * delta;
            Vector trial_eta = eta + t * Xdelta;
            double Ft;
            try {
                Ft = glm_loss(family, y, trial_eta) + penalty_sum(pen, trial);
            } catch (const DomainError&) {
                continue;
            }
            double bound = descent < 0.0 ? F + 1e-4 * t * descent : F;
            if (Ft <= bound) {
                beta = std::move(trial);
                eta = std::move(trial_eta);
                F = Ft;
                accepted = true;
                break;
            }
        }
        if (opts.record_objective) fit.objective_trace.push_back(F);
        if (!accepted || t * delta.lpNorm<Eigen::Infinity>() < cfg.tol) {
            fit.converged = accepted || delta.lpNorm<Eigen::Infinity>() < 10.0 * cfg.tol;
            break;
        }
    }
    fit.beta = std::move(beta);
    fit.objective = F;
    return fit;
}

}  // namespace

PenalizedFit fit_penalized(const Matrix& X, const Vector& y, const ModelFamily& family, const PenaltyConfig& penalty,
                           const SolverConfig& cfg, const FitOptions& opts) {
    cfg.validate();
    penalty.validate();
    if (y.size() != X.rows()) throw DimensionMismatch("response length does not match design rows");
    if (X.rows() < 2) throw InvalidArgument("at least 2 observations are required");
    if (opts.offset && opts.offset->size() != X.rows()) throw DimensionMismatch("offset length mismatch");
    if (opts.warm_start && opts.warm_start->size() != X.cols()) throw DimensionMismatch("warm start length mismatch");
    if (penalty.lambda == 0.0 && X.cols() > X.rows())
        throw RankDeficient("lambda = 0 with d > n has no unique minimizer");

    PenalizedFit fit;
    if (cfg.standardize) {
        Vector s = column_scales(X);
        Matrix Xs = X * s.cwiseInverse().asDiagonal();
        FitOptions o = opts;
        if (o.warm_start) o.warm_start = Vector(o.warm_start->cwiseProduct(s));
        SolverConfig c = cfg;
        c.standardize = false;
        fit = fit_penalized(Xs, y, family, penalty, c, o);
        fit.beta = fit.beta.cwiseQuotient(s);
    } else if (family.is_gaussian()) {
        fit = fit_gaussian(X, y, family, penalty, cfg, opts);
    } else {
        fit = fit_glm(X, y, family, penalty, cfg, opts);
    }
    fit.lambda = penalty.lambda;
    fit.penalty = penalty;
    if (!fit.converged)
        fit.warning = "solver did not converge within " + std::to_string(cfg.max_iter) + " iterations";
    return fit;
}

PenalizedFit fit_lasso(const Dataset& data, const ModelFamily& family, const PenaltyConfig& penalty,
                       const SolverConfig& cfg, const FitOptions& opts) {
    return fit_penalized(data.Q(), data.y(), family, penalty, cfg, opts);
}

PenalizedFit fit_weighted_lasso(const Matrix& regressors, const Vector& target, const Vector& weights, double lambda,
                                const SolverConfig& cfg, const std::optional<Vector>& warm_start) {
    cfg.validate();
    const Index n = regressors.rows();
    if (target.size() != n || weights.size() != n) throw DimensionMismatch("weighted lasso: length mismatch");
    if (!weights.allFinite() || (weights.array() < 0.0).any())
        throw InvalidArgument("weighted lasso: weights must be finite and nonnegative");
    if (weights.maxCoeff() <= 0.0) throw DegenerateProblem("weighted lasso: all weights are zero");
    PenaltyConfig pen = PenaltyConfig::l1(lambda);

    PenalizedFit fit;
    fit.lambda = lambda;
    fit.penalty = pen;
    const Index m = regressors.cols();
    if (m == 0) {
        fit.beta = Vector::Zero(0);
        fit.converged = true;
        fit.objective = (weights.array() * target.array().square()).sum() / static_cast<double>(n);
        return fit;
    }
    if (lambda == 0.0 && m > n) throw RankDeficient("lambda = 0 with more regressors than observations");

    // The squared loss without the 1/2 equals the halved form with doubled weights.
    Vector w2 = 2.0 * weights;
    Vector beta = warm_start ? *warm_start : Vector::Zero(m);
    Vector u = w2.cwiseProduct(target - regressors * beta);
    Matrix WX = w2.asDiagonal() * regressors;
    Vector curv = (regressors.array() * WX.array()).colwise().sum().transpose() / static_cast<double>(n);
    auto res = detail::coordinate_descent(regressors, WX, curv, pen, beta, u, cfg.max_iter, cfg.tol, cfg.active_set);
    Vector r = target - regressors * beta;
    fit.objective = (weights.array() * r.array().square()).sum() / static_cast<double>(n) + lambda * beta.lpNorm<1>();
    fit.beta = std::move(beta);
    fit.iterations = res.sweeps;
    fit.converged = res.converged;
    if (!fit.converged) fit.warning = "weighted lasso did not converge";
    return fit;
}

PenalizedFit fit_quadratic_lasso(const Matrix& A, const Vector& b, double lambda, const SolverConfig& cfg) {
    cfg.validate();
    if (A.rows() != A.cols() || A.rows() != b.size()) throw DimensionMismatch("quadratic lasso: shape mismatch");
    PenaltyConfig pen = PenaltyConfig::l1(lambda);
    Vector beta = Vector::Zero(b.size());
    Vector g = b;
    auto res = detail::coordinate_descent_cov(A, pen, beta, g, cfg.max_iter, cfg.tol, cfg.active_set);
    PenalizedFit fit;
    fit.objective = 0.5 * beta.dot(A * beta) - b.dot(beta) + lambda * beta.lpNorm<1>();
    fit.beta = std::move(beta);
    fit.lambda = lambda;
    fit.penalty = pen;
    fit.iterations = res.sweeps;
    fit.converged = res.converged;
    if (!fit.converged) fit.warning = "quadratic lasso did not converge";
    return fit;
}

ScaledLassoFit fit_scaled_lasso(const Dataset& data, double lambda, const SolverConfig& cfg) {
    cfg.validate();
    if (data.n() < 3) throw InvalidArgument("scaled lasso needs n >= 3");
    if (!(lambda >= 0.0)) throw InvalidArgument("scaled lasso lambda must be >= 0");
    const double n = static_cast<double>(data.n());
    const double floor = 1e-10 * std::sqrt(data.y().squaredNorm() / n + 1e-300);

    ScaledLassoFit out;
    double sigma = std::sqrt(data.y().squaredNorm() / n);
    if (!(sigma > floor)) throw DegenerateProblem("scaled lasso: response is identically zero");
    FitOptions opts;
    const ModelFamily unit = ModelFamily::gaussian(1.0);
    for (int it = 1; it <= cfg.max_iter; ++it) {
        out.outer_iterations = it;
        PenalizedFit f = fit_penalized(data.Q(), data.y(), unit, PenaltyConfig::l1(lambda * sigma), cfg, opts);
        opts.warm_start = f.beta;
        double next = std::sqrt((data.y() - data.Q() * f.beta).squaredNorm() / n);
        if (!(next > floor)) throw DegenerateProblem("scaled lasso: noise level collapsed to zero");
        bool done = std::abs(next - sigma) < cfg.tol;
        sigma = next;
        out.fit = std::move(f);
        if (done) break;
    }
    // Refit at the final sigma so beta and sigma satisfy both stationarity conditions.
    PenalizedFit f = fit_penalized(data.Q(), data.y(), unit, PenaltyConfig::l1(lambda * sigma), cfg, opts);
    double last = std::sqrt((data.y() - data.Q() * f.beta).squaredNorm() / n);
    out.fit = std::move(f);
    out.fit.converged = out.fit.converged && std::abs(last - sigma) < 10.0 * cfg.tol;
    out.fit.lambda = lambda;
    out.sigma = last;
    return out;
}

double lasso_kkt_violation(const Matrix& X, const Vector& y, const ModelFamily& family, const Vector& beta,
                           double lambda, const std::optional<Vector>& offset) {
    Vector eta = X * beta;
    if (offset) eta += *offset;
    Vector g(eta.size());
    for (Index i = 0; i < eta.size(); ++i) g(i) = family.scale() * (family.b1(eta(i)) - y(i));
    Vector grad = X.transpose() * g / static_cast<double>(X.rows());
    double worst = 0.0;
    for (Index j = 0; j < beta.size(); ++j) {
        double v;
        if (beta(j) == 0.0)
            v = std::abs(grad(j)) - lambda;
        else
            v = std::abs(grad(j) + lambda * (beta(j) > 0.0 ? 1.0 : -1.0));
        worst = std::max(worst, v);
    }
    return worst;
}

}  // namespace descore
