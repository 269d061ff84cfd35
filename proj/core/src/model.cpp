#include "descore/model.hpp"

#include <cmath>
#include <string>

#include "descore/errors.hpp"

namespace descore {

namespace {

constexpr double kPoissonEtaMax = 700.0;

void check_finite(const Vector& v, const char* what) {
    if (!v.allFinite()) throw DataError(std::string(what) + " contains non-finite values");
}

void check_beta(const Dataset& data, const Vector& beta) {
    if (beta.size() != data.d())
        throw DimensionMismatch("beta has length " + std::to_string(beta.size()) + ", expected " +
                                std::to_string(data.d()));
}

}  // namespace

Dataset::Dataset(Vector y, Matrix Q, IndexList interest)
    : y_(std::move(y)), Q_(std::move(Q)), interest_(std::move(interest)) {
    if (y_.size() != Q_.rows())
        throw DimensionMismatch("response length " + std::to_string(y_.size()) +
                                " does not match design rows " + std::to_string(Q_.rows()));
    if (Q_.rows() < 2) throw InvalidArgument("dataset needs at least 2 observations");
    if (Q_.cols() < 1) throw InvalidArgument("dataset needs at least 1 covariate");
    if (interest_.empty()) throw InvalidArgument("interest index set is empty");
    for (std::size_t k = 0; k < interest_.size(); ++k) {
        if (interest_[k] < 0 || interest_[k] >= Q_.cols())
            throw InvalidArgument("interest index " + std::to_string(interest_[k]) + " out of range");
        if (k > 0 && interest_[k] <= interest_[k - 1])
            throw InvalidArgument("interest indices must be strictly increasing");
    }
    check_finite(y_, "response");
    if (!Q_.allFinite()) throw DataError("design matrix contains non-finite values");

    std::vector<bool> is_interest(static_cast<std::size_t>(Q_.cols()), false);
    for (Index j : interest_) is_interest[static_cast<std::size_t>(j)] = true;
    for (Index j = 0; j < Q_.cols(); ++j)
        if (!is_interest[static_cast<std::size_t>(j)]) nuisance_.push_back(j);
}

Matrix Dataset::interest_columns() const { return select_columns(Q_, interest_); }
Matrix Dataset::nuisance_columns() const { return select_columns(Q_, nuisance_); }

Vector Dataset::theta_of(const Vector& beta) const {
    Vector out(d0());
    for (Index k = 0; k < d0(); ++k) out(k) = beta(interest_[static_cast<std::size_t>(k)]);
    return out;
}

Vector Dataset::gamma_of(const Vector& beta) const {
    Vector out(static_cast<Index>(nuisance_.size()));
    for (std::size_t k = 0; k < nuisance_.size(); ++k) out(static_cast<Index>(k)) = beta(nuisance_[k]);
    return out;
}

Vector Dataset::assemble(const Vector& theta, const Vector& gamma) const {
    if (theta.size() != d0() || gamma.size() != static_cast<Index>(nuisance_.size()))
        throw DimensionMismatch("theta/gamma sizes do not match the interest partition");
    Vector beta(d());
    for (std::size_t k = 0; k < interest_.size(); ++k) beta(interest_[k]) = theta(static_cast<Index>(k));
    for (std::size_t k = 0; k < nuisance_.size(); ++k) beta(nuisance_[k]) = gamma(static_cast<Index>(k));
    return beta;
}

Dataset Dataset::with_interest(IndexList interest) const { return Dataset(y_, Q_, std::move(interest)); }

ModelFamily ModelFamily::gaussian(double sigma2) {
    if (!(sigma2 > 0.0) || !std::isfinite(sigma2))
        throw InvalidArgument("Gaussian family requires sigma2 > 0");
    return ModelFamily(FamilyKind::GaussianKnownVar, sigma2);
}
ModelFamily ModelFamily::gaussian_unknown_var() { return ModelFamily(FamilyKind::GaussianUnknownVar, 1.0); }
ModelFamily ModelFamily::logistic() { return ModelFamily(FamilyKind::Logistic, 1.0); }
ModelFamily ModelFamily::poisson() { return ModelFamily(FamilyKind::Poisson, 1.0); }

std::string ModelFamily::name() const {
    switch (kind_) {
        case FamilyKind::GaussianKnownVar: return "gaussian";
        case FamilyKind::GaussianUnknownVar: return "gaussian-unknown-var";
        case FamilyKind::Logistic: return "logistic";
        case FamilyKind::Poisson: return "poisson";
    }
    return "unknown";
}

ModelFamily family_from_name(const std::string& name, double sigma2) {
    if (name == "gaussian") return ModelFamily::gaussian(sigma2);
    if (name == "gaussian-unknown-var") return ModelFamily::gaussian_unknown_var();
    if (name == "logistic") return ModelFamily::logistic();
    if (name == "poisson") return ModelFamily::poisson();
    throw InvalidArgument("unknown family '" + name + "'");
}

double ModelFamily::b(double t) const {
    switch (kind_) {
        case FamilyKind::Logistic: return std::max(t, 0.0) + std::log1p(std::exp(-std::abs(t)));
        case FamilyKind::Poisson:
            if (t > kPoissonEtaMax) throw DomainError("Poisson linear predictor exceeds 700");
            return std::exp(t);
        default: return 0.5 * t * t;
    }
}

double ModelFamily::b1(double t) const {
    switch (kind_) {
        case FamilyKind::Logistic: {
            double e = std::exp(-std::abs(t));
            return t >= 0.0 ? 1.0 / (1.0 + e) : e / (1.0 + e);
        }
        case FamilyKind::Poisson:
            if (t > kPoissonEtaMax) throw DomainError("Poisson linear predictor exceeds 700");
            return std::exp(t);
        default: return t;
    }
}

double ModelFamily::b2(double t) const {
    switch (kind_) {
        case FamilyKind::Logistic: {
            double e = std::exp(-std::abs(t));
            return e / ((1.0 + e) * (1.0 + e));
        }
        case FamilyKind::Poisson:
            if (t > kPoissonEtaMax) throw DomainError("Poisson linear predictor exceeds 700");
            return std::exp(t);
        default: return 1.0;
    }
}

Matrix select_columns(const Matrix& Q, const IndexList& cols) {
    Matrix out(Q.rows(), static_cast<Index>(cols.size()));
    for (std::size_t k = 0; k < cols.size(); ++k) out.col(static_cast<Index>(k)) = Q.col(cols[k]);
    return out;
}

Vector linear_predictor(const Dataset& data, const Vector& beta) {
    check_beta(data, beta);
    return data.Q() * beta;
}

Vector observation_losses(const Dataset& data, const ModelFamily& family, const Vector& beta) {
    Vector eta = linear_predictor(data, beta);
    const Vector& y = data.y();
    Vector out(eta.size());
    if (family.is_gaussian()) {
        double s = family.scale();
        for (Index i = 0; i < eta.size(); ++i) {
            double r = y(i) - eta(i);
            out(i) = 0.5 * s * r * r;
        }
    } else {
        for (Index i = 0; i < eta.size(); ++i) out(i) = family.b(eta(i)) - y(i) * eta(i);
    }
    return out;
}

double neg_log_likelihood(const Dataset& data, const ModelFamily& family, const Vector& beta) {
    return observation_losses(data, family, beta).mean();
}

Vector gradient_factors(const Dataset& data, const ModelFamily& family, const Vector& eta) {
    Vector g(eta.size());
    double s = family.scale();
    for (Index i = 0; i < eta.size(); ++i) g(i) = s * (family.b1(eta(i)) - data.y()(i));
    return g;
}

Vector curvature_weights(const ModelFamily& family, const Vector& eta) {
    Vector w(eta.size());
    double s = family.scale();
    for (Index i = 0; i < eta.size(); ++i) w(i) = s * family.b2(eta(i));
    return w;
}

Vector score(const Dataset& data, const ModelFamily& family, const Vector& beta) {
    Vector g = gradient_factors(data, family, linear_predictor(data, beta));
    return data.Q().transpose() * g / static_cast<double>(data.n());
}

Matrix hessian(const Dataset& data, const ModelFamily& family, const Vector& beta) {
    Vector w = curvature_weights(family, linear_predictor(data, beta));
    Matrix H = data.Q().transpose() * w.asDiagonal() * data.Q() / static_cast<double>(data.n());
    return 0.5 * (H + H.transpose());
}

Matrix per_observation_gradients(const Dataset& data, const ModelFamily& family, const Vector& beta) {
    Vector g = gradient_factors(data, family, linear_predictor(data, beta));
    return g.asDiagonal() * data.Q();
}

Matrix weighted_cross(const Matrix& Q, const Vector& weights, const IndexList& rows, const IndexList& cols) {
    Matrix R = select_columns(Q, rows);
    Matrix C = select_columns(Q, cols);
    return R.transpose() * weights.asDiagonal() * C / static_cast<double>(Q.rows());
}

}  // namespace descore
