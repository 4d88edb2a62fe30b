#include "actsub/bounds.hpp"

#include "actsub/error.hpp"

#include <cmath>

namespace actsub {

void BoundInputs::validate() const {
  if (n < 1 || n > eigenvalues.size()) throw InvalidInput("bound inputs: n out of range");
  if (!(poincare_constant > 0.0)) throw InvalidInput("bound inputs: C1 must be positive");
  if (mc_samples < 1) throw InvalidInput("bound inputs: N must be at least 1");
  if (!(epsilon >= 0.0)) throw InvalidInput("bound inputs: epsilon must be non-negative");
  if (!(response_error >= 0.0)) throw InvalidInput("bound inputs: C2 delta must be non-negative");
  if (!eigenvalues.allFinite() || (eigenvalues.array() < 0.0).any())
    throw InvalidInput("bound inputs: eigenvalues must be finite and non-negative");
}

namespace {

double tail(const BoundInputs& b) {
  return b.eigenvalues.tail(b.eigenvalues.size() - b.n).sum();
}

double mc_factor(const BoundInputs& b) { return 1.0 + 1.0 / static_cast<double>(b.mc_samples); }

}  // namespace

double bound_conditional(const BoundInputs& b) {
  b.validate();
  return b.poincare_constant * tail(b);
}

double bound_monte_carlo(const BoundInputs& b) {
  b.validate();
  return b.poincare_constant * mc_factor(b) * tail(b);
}

double bound_response_surface(const BoundInputs& b) {
  return bound_monte_carlo(b) + b.response_error;
}

double bound_perturbed(const BoundInputs& b, BoundKind kind) {
  b.validate();
  const double active = b.eigenvalues.head(b.n).sum();
  const double rest = tail(b);
  // Expanded square so that epsilon = 0 reproduces the unperturbed tail sum bit for bit.
  const double mixed = b.epsilon * b.epsilon * active +
                       2.0 * b.epsilon * std::sqrt(active * rest) + rest;
  switch (kind) {
    case BoundKind::conditional:
      return b.poincare_constant * mixed;
    case BoundKind::monte_carlo:
      return b.poincare_constant * mc_factor(b) * mixed;
    case BoundKind::response_surface:
      return b.poincare_constant * mc_factor(b) * mixed + b.response_error;
  }
  return 0.0;
}

}  // namespace actsub
