#pragma once

#include "actsub/linalg.hpp"

namespace actsub {

/// Inputs shared by the mean-squared-error bounds of the f ~ F ~ F-hat ~ F-tilde chain.
struct BoundInputs {
  Vector eigenvalues;
  Eigen::Index n = 1;
  double poincare_constant = 1.0;  // C1
  long mc_samples = 1;             // N
  double response_error = 0.0;     // C2 * delta, supplied by the caller
  double epsilon = 0.0;            // ||W - W~||

  void validate() const;
};

enum class BoundKind { conditional, monte_carlo, response_surface };

/// C1 (lambda_{n+1} + ... + lambda_m)
double bound_conditional(const BoundInputs& b);
/// C1 (1 + 1/N) (lambda_{n+1} + ... + lambda_m)
double bound_monte_carlo(const BoundInputs& b);
/// bound_monte_carlo + C2 delta
double bound_response_surface(const BoundInputs& b);
/// Perturbed-direction variant: the tail sum is replaced by
/// (epsilon sqrt(active sum) + sqrt(tail sum))^2.
double bound_perturbed(const BoundInputs& b, BoundKind kind);

}  // namespace actsub
