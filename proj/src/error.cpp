#include "freespec/error.hpp"

namespace freespec {

DegenerateRowError::DegenerateRowError(std::size_t row, const std::string& what)
    : Error(what), row_(row) {}

ConditioningError::ConditioningError(double condition, const std::string& what)
    : Error(what), condition_(condition) {}

NonConvergenceError::NonConvergenceError(double residual, long iterations,
                                         const std::string& what)
    : Error(what), residual_(residual), iterations_(iterations) {}

}  // namespace freespec
