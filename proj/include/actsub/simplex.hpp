#pragma once

#include "actsub/linalg.hpp"

#include <optional>

namespace actsub {

/// Dense two-phase simplex for  min c^T v  s.t.  A v = b, v >= 0.
/// Bland's rule throughout; intended for the small programs of point lifting.
struct LinearProgramResult {
  Vector solution;
  double objective = 0.0;
};

/// Returns nullopt when the program is infeasible. Throws NumericalError if the
/// objective is unbounded below.
std::optional<LinearProgramResult> solve_standard_form_lp(const Matrix& a, const Vector& b,
                                                          const Vector& c,
                                                          double tolerance = 1e-9);

}  // namespace actsub
