#pragma once

#include "actsub/input_domain.hpp"
#include "actsub/linalg.hpp"
#include "actsub/subspace.hpp"

#include <cstdint>
#include <optional>

namespace actsub {

/// Y = { W1^T x : x in X }. All of R^n for Gaussian inputs, a zonotope for the hypercube.
class ReducedDomain {
 public:
  ReducedDomain(InputDomain input, ActiveSubspace subspace);

  const InputDomain& input() const { return input_; }
  const ActiveSubspace& subspace() const { return subspace_; }
  Eigen::Index active_dimension() const { return subspace_.active_dimension(); }
  bool is_zonotope() const { return input_.kind == InputKind::uniform_hypercube; }

  /// Zonotope vertices as rows (counterclockwise for n = 2). Empty for the Gaussian case
  /// and for zonotopes with n >= 3.
  const std::optional<Matrix>& vertices() const { return vertices_; }

  /// Membership in Y. Always true in the Gaussian case.
  bool contains(const Vector& y, double tolerance = 1e-10) const;

 private:
  InputDomain input_;
  ActiveSubspace subspace_;
  std::optional<Matrix> vertices_;
};

/// Extreme points of { W1^T x : -1 <= x <= 1 } as rows. n = 1 gives (-r, r); n = 2 gives the
/// polygon counterclockwise. Throws Unsupported for n >= 3.
Matrix zonotope_vertices(const Matrix& active_basis);

/// Membership in a convex polygon given counterclockwise (n = 2) or an interval (n = 1).
bool polytope_contains(const Matrix& vertices, const Vector& y, double tolerance = 1e-10);

/// k^n tensor grid with each univariate design equally spaced on [-3, 3]. Rows are points;
/// the last coordinate varies fastest. Gaussian domains only.
Matrix tensor_design(const ReducedDomain& domain, int points_per_dim);

/// Grid of the given spacing (anchored at the origin) clipped to the zonotope, plus its
/// vertices. Rows are points.
Matrix zonotope_design(const ReducedDomain& domain, double spacing);

/// A full-space x with W1^T x = y. Gaussian: x = W1 y. Hypercube: the point of the slice
/// furthest from the box faces, found by linear programming.
Vector lift_point(const ReducedDomain& domain, const Vector& y);

struct HitAndRunSettings {
  long burn_in_per_dim = 100;  // burn-in = burn_in_per_dim * (m - n) steps
  long thinning = 10;
};

/// N draws (rows) of z from the conditional density given y. Gaussian: independent standard
/// normals. Hypercube: thinned hit-and-run chain on { z : -1 <= W1 y + W2 z <= 1 }.
Matrix sample_conditional_z(const ReducedDomain& domain, const Vector& y, long count,
                            std::uint64_t seed, const HitAndRunSettings& settings = {});

/// Effective sample size of a scalar chain from its autocorrelation (summed until the first
/// non-positive lag).
double effective_sample_size(const Vector& chain);

}  // namespace actsub
