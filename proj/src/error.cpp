#include "nlsw/error.hpp"

#include <utility>

namespace nlsw {

RangeError::RangeError(const std::string& what, double lo, double hi)
    : PreconditionError(what), lo_(lo), hi_(hi) {}

SingularOperator::SingularOperator(const std::string& what, double gap)
    : SolverError(what), gap_(gap) {}

FlowStalled::FlowStalled(const std::string& what, double residual)
    : SolverError(what), residual_(residual) {}

GluingFailed::GluingFailed(const std::string& what, long separation, std::vector<double> residuals)
    : SolverError(what), separation_(separation), residuals_(std::move(residuals)) {}

NoInstabilityDetected::NoInstabilityDetected(const std::string& what, double mu)
    : SolverError(what), mu_(mu) {}

} // namespace nlsw
