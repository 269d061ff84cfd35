#pragma once

#include <stdexcept>
#include <string>

namespace descore {

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
    virtual const char* name() const noexcept { return "Error"; }
};

class InvalidArgument : public Error {
public:
    using Error::Error;
    const char* name() const noexcept override { return "InvalidArgument"; }
};

class DimensionMismatch : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
    const char* name() const noexcept override { return "DimensionMismatch"; }
};

class DataError : public Error {
public:
    using Error::Error;
    const char* name() const noexcept override { return "DataError"; }
};

// Numerical degeneracies raised by the estimation and inference layers.
class NumericalError : public Error {
public:
    using Error::Error;
    const char* name() const noexcept override { return "NumericalError"; }
};

class DomainError : public NumericalError {
public:
    using NumericalError::NumericalError;
    const char* name() const noexcept override { return "DomainError"; }
};

class RankDeficient : public NumericalError {
public:
    using NumericalError::NumericalError;
    const char* name() const noexcept override { return "RankDeficient"; }
};

class DegenerateProblem : public NumericalError {
public:
    using NumericalError::NumericalError;
    const char* name() const noexcept override { return "DegenerateProblem"; }
};

class Infeasible : public NumericalError {
public:
    Infeasible(const std::string& what, double gap) : NumericalError(what), gap_(gap) {}
    const char* name() const noexcept override { return "Infeasible"; }
    /// Lower bound on how far lambda' falls short of the smallest attainable residual.
    double gap() const noexcept { return gap_; }

private:
    double gap_;
};

class NonPositiveInformation : public NumericalError {
public:
    using NumericalError::NumericalError;
    const char* name() const noexcept override { return "NonPositiveInformation"; }
};

class DegenerateResidualVariance : public NumericalError {
public:
    using NumericalError::NumericalError;
    const char* name() const noexcept override { return "DegenerateResidualVariance"; }
};

class TooManyFailures : public NumericalError {
public:
    using NumericalError::NumericalError;
    const char* name() const noexcept override { return "TooManyFailures"; }
};

}  // namespace descore
