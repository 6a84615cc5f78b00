#ifndef DESCEST_ERRORS_HPP
#define DESCEST_ERRORS_HPP

#include <stdexcept>

namespace descest {

/// Input violates an operation contract (dimension mismatch, non-square
/// where square is required, non-finite entries, ...).
struct ContractViolation : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// A numerical routine failed (decomposition did not converge, non-SPD
/// matrix in a Cholesky solve, singular assembled system, ...).
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Data admits no consistent solution (unsolvable simulation step,
/// measurement record outside the disturbance budget).
struct InfeasibleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace descest

#endif
