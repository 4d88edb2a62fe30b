#pragma once

#include <Eigen/Core>

#include <string>

namespace actsub {

enum class InputKind {
  gaussian_standard,  // R^m with standard normal density
  uniform_hypercube,  // [-1, 1]^m with uniform density
};

struct InputDomain {
  InputKind kind = InputKind::gaussian_standard;
  Eigen::Index m = 0;
};

std::string to_string(InputKind kind);
InputKind input_kind_from_string(const std::string& name);

/// Poincare constant estimate: 1 for the standard Gaussian, 2 sqrt(m) / pi for the hypercube.
double default_poincare_constant(const InputDomain& domain);

}  // namespace actsub
