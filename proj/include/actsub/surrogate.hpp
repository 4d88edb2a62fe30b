#pragma once

#include "actsub/domain.hpp"
#include "actsub/model.hpp"

#include <cstdint>

namespace actsub {

struct McSurrogateConfig {
  long samples = 1;  // N, conditional draws per evaluation
  std::uint64_t seed = 0;
};

/// G-hat(y) = (1/N) sum_i f(W1 y + W2 z_i) with z_i drawn from the conditional density.
double evaluate_Ghat(const ModelFunction& model, const ReducedDomain& domain, const Vector& y,
                     const McSurrogateConfig& cfg);

/// F-hat(x) = G-hat(W1^T x).
double evaluate_Fhat(const ModelFunction& model, const ReducedDomain& domain, const Vector& x,
                     const McSurrogateConfig& cfg);

}  // namespace actsub
