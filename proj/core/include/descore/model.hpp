#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace descore {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;
using IndexList = std::vector<Index>;

/// Response y, design Q (n x d) and the ordered coordinates under test.
/// The remaining columns form the nuisance block.
class Dataset {
public:
    Dataset(Vector y, Matrix Q, IndexList interest);

    const Vector& y() const { return y_; }
    const Matrix& Q() const { return Q_; }
    const IndexList& interest() const { return interest_; }
    const IndexList& nuisance() const { return nuisance_; }

    Index n() const { return Q_.rows(); }
    Index d() const { return Q_.cols(); }
    Index d0() const { return static_cast<Index>(interest_.size()); }

    Matrix interest_columns() const;
    Matrix nuisance_columns() const;

    Vector theta_of(const Vector& beta) const;
    Vector gamma_of(const Vector& beta) const;
    Vector assemble(const Vector& theta, const Vector& gamma) const;

    /// Same data with a different interest set.
    Dataset with_interest(IndexList interest) const;

private:
    Vector y_;
    Matrix Q_;
    IndexList interest_;
    IndexList nuisance_;
};

enum class FamilyKind { GaussianKnownVar, GaussianUnknownVar, Logistic, Poisson };

class ModelFamily {
public:
    static ModelFamily gaussian(double sigma2 = 1.0);
    static ModelFamily gaussian_unknown_var();
    static ModelFamily logistic();
    static ModelFamily poisson();

    FamilyKind kind() const { return kind_; }
    bool is_gaussian() const {
        return kind_ == FamilyKind::GaussianKnownVar || kind_ == FamilyKind::GaussianUnknownVar;
    }
    /// Noise variance used in likelihood computations; 1 for the unknown-variance family.
    double sigma2() const { return sigma2_; }
    std::string name() const;

    double b(double t) const;
    double b1(double t) const;
    double b2(double t) const;

    /// Multiplier on the canonical loss: 1/sigma2 for Gaussian, 1 otherwise.
    double scale() const { return is_gaussian() ? 1.0 / sigma2_ : 1.0; }

private:
    ModelFamily(FamilyKind kind, double sigma2) : kind_(kind), sigma2_(sigma2) {}
    FamilyKind kind_;
    double sigma2_;
};

ModelFamily family_from_name(const std::string& name, double sigma2 = 1.0);

/// Q * beta, with a dimension check.
Vector linear_predictor(const Dataset& data, const Vector& beta);

/// (1/n) sum of per-observation negative log-likelihoods. The Gaussian form is
/// (1/(2 sigma2 n)) sum r_i^2 with the log(2 pi sigma2) constant dropped.
double neg_log_likelihood(const Dataset& data, const ModelFamily& family, const Vector& beta);

/// Per-observation loss terms; their mean is neg_log_likelihood.
Vector observation_losses(const Dataset& data, const ModelFamily& family, const Vector& beta);

Vector score(const Dataset& data, const ModelFamily& family, const Vector& beta);
Matrix hessian(const Dataset& data, const ModelFamily& family, const Vector& beta);

/// Row i holds the gradient of the i-th loss term (not divided by n).
Matrix per_observation_gradients(const Dataset& data, const ModelFamily& family, const Vector& beta);

/// d loss_i / d eta_i = scale * (b'(eta_i) - y_i).
Vector gradient_factors(const Dataset& data, const ModelFamily& family, const Vector& eta);

/// scale * b''(eta_i).
Vector curvature_weights(const ModelFamily& family, const Vector& eta);

/// (1/n) sum_i weights_i * Q_i[rows] Q_i[cols]^T.
Matrix weighted_cross(const Matrix& Q, const Vector& weights, const IndexList& rows,
                      const IndexList& cols);

Matrix select_columns(const Matrix& Q, const IndexList& cols);

}  // namespace descore
