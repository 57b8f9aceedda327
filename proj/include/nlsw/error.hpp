#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace nlsw {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad input to an operation: the caller can fix it.
class PreconditionError : public Error {
public:
    using Error::Error;
};

// A solver ran and did not deliver.
class SolverError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class InvalidField : public PreconditionError {
public:
    using PreconditionError::PreconditionError;
};

class GridMismatch : public PreconditionError {
public:
    using PreconditionError::PreconditionError;
};

class AssumptionViolation : public PreconditionError {
public:
    using PreconditionError::PreconditionError;
};

class MisalignedTranslation : public PreconditionError {
public:
    using PreconditionError::PreconditionError;
};

class CriticalExponent : public PreconditionError {
public:
    using PreconditionError::PreconditionError;
};

class PositivityViolation : public PreconditionError {
public:
    using PreconditionError::PreconditionError;
};

class RangeError : public PreconditionError {
public:
    RangeError(const std::string& what, double lo, double hi);
    double lo() const { return lo_; }
    double hi() const { return hi_; }

private:
    double lo_, hi_;
};

class SingularOperator : public SolverError {
public:
    SingularOperator(const std::string& what, double gap);
    double gap() const { return gap_; }

private:
    double gap_;
};

class FlowStalled : public SolverError {
public:
    FlowStalled(const std::string& what, double residual);
    double residual() const { return residual_; }

private:
    double residual_;
};

class GluingFailed : public SolverError {
public:
    GluingFailed(const std::string& what, long separation, std::vector<double> residuals);
    long separation() const { return separation_; }
    const std::vector<double>& residuals() const { return residuals_; }

private:
    long separation_;
    std::vector<double> residuals_;
};

class DegenerateSuperposition : public SolverError {
public:
    using SolverError::SolverError;
};

class NotFreelyNondegenerate : public SolverError {
public:
    using SolverError::SolverError;
};

class NoInstabilityDetected : public SolverError {
public:
    NoInstabilityDetected(const std::string& what, double mu);
    double mu() const { return mu_; }

private:
    double mu_;
};

class ContinuationNeeded : public SolverError {
public:
    using SolverError::SolverError;
};

class FitRejected : public SolverError {
public:
    using SolverError::SolverError;
};

class IntegratorFault : public SolverError {
public:
    using SolverError::SolverError;
};

} // namespace nlsw
