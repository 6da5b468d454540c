#pragma once

#include <stdexcept>
#include <string>

namespace ucpext {

// Malformed or out-of-contract input (wrong shapes, non-Hermitian data,
// negative rates, ...).
class InputError : public std::invalid_argument {
 public:
  explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

// A computation hit a numerical obstruction: singular systems, failed
// inversions, non-convergent iterations that must not be reported silently.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what, double condition = 0.0)
      : std::runtime_error(what), condition_(condition) {}

  // Condition estimate of the offending system, 0 when not applicable.
  double condition() const noexcept { return condition_; }

 private:
  double condition_;
};

namespace tol {
// Structural checks (Hermitian symmetry, exact identities).
inline constexpr double kStructural = 1e-12;
// Numerical residuals of dense kernels.
inline constexpr double kResidual = 1e-10;
// User-facing feasibility tolerance.
inline constexpr double kFeasibility = 1e-8;
}  // namespace tol

}  // namespace ucpext
