#include "actsub/surrogate.hpp"

#include "actsub/error.hpp"

#include <cstdio>
#include <string>

namespace actsub {

namespace {

std::string describe_point(const Vector& x) {
  std::string out = "[";
  char buf[32];
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    std::snprintf(buf, sizeof(buf), i == 0 ? "%.6g" : ", %.6g", x(i));
    out += buf;
  }
  return out + "]";
}

template <typename E>
[[noreturn]] void rethrow_with_point(const E& e, const Vector& x) {
  throw E(std::string(e.what()) + " (at x = " + describe_point(x) + ")");
}

}  // namespace

double evaluate_Ghat(const ModelFunction& model, const ReducedDomain& domain, const Vector& y,
                     const McSurrogateConfig& cfg) {
  if (cfg.samples < 1) throw InvalidInput("evaluate_Ghat: N must be at least 1");
  if (model.dimension() != domain.subspace().dimension())
    throw InvalidInput("evaluate_Ghat: model and subspace dimensions differ");
  const Matrix z = sample_conditional_z(domain, y, cfg.samples, cfg.seed);
  const Vector center = domain.subspace().active_basis() * y;
  const Matrix w2 = domain.subspace().inactive_basis();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    const Vector x = center + w2 * z.row(i).transpose();
    try {
      sum += model.value(x);
    } catch (const NumericalError& e) {
      rethrow_with_point(e, x);
    } catch (const InvalidInput& e) {
      rethrow_with_point(e, x);
    }
  }
  return sum / static_cast<double>(z.rows());
}

double evaluate_Fhat(const ModelFunction& model, const ReducedDomain& domain, const Vector& x,
                     const McSurrogateConfig& cfg) {
  if (x.size() != domain.subspace().dimension())
    throw InvalidInput("evaluate_Fhat: x has wrong dimension");
  return evaluate_Ghat(model, domain, domain.subspace().active_basis().transpose() * x, cfg);
}

}  // namespace actsub
