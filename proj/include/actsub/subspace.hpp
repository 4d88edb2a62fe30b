#pragma once

#include "actsub/linalg.hpp"

#include <cstdint>
#include <vector>

namespace actsub {

class ModelFunction;

/// M sampled inputs with their function values and gradients, stored column-wise
/// (points and gradients are m x M).
struct GradientSampleSet {
  Matrix points;
  Vector values;
  Matrix gradients;

  Eigen::Index dimension() const { return points.rows(); }
  Eigen::Index count() const { return points.cols(); }

  /// Throws InvalidInput on inconsistent shapes, M == 0, or non-finite entries.
  void validate() const;
};

/// Eigenvector basis W of the gradient outer-product matrix with eigenvalues in
/// descending order, partitioned after the first n columns.
class ActiveSubspace {
 public:
  ActiveSubspace(Matrix basis, Vector eigenvalues, Eigen::Index n);

  const Matrix& basis() const { return basis_; }
  const Vector& eigenvalues() const { return eigenvalues_; }
  Eigen::Index dimension() const { return basis_.rows(); }
  Eigen::Index active_dimension() const { return n_; }

  Matrix active_basis() const { return basis_.leftCols(n_); }
  Matrix inactive_basis() const { return basis_.rightCols(basis_.cols() - n_); }

  double active_sum() const { return eigenvalues_.head(n_).sum(); }
  double tail_sum() const { return eigenvalues_.tail(eigenvalues_.size() - n_).sum(); }

  /// Same basis and eigenvalues, different partition index.
  ActiveSubspace repartition(Eigen::Index n) const;

 private:
  Matrix basis_;
  Vector eigenvalues_;
  Eigen::Index n_;
};

/// G = (1/sqrt(M)) [grad f_1 ... grad f_M].
Matrix assemble_gradient_matrix(const GradientSampleSet& samples);

/// Left singular vectors of G (completed to a full basis when M < m) and lambda = sigma^2.
/// Columns follow the largest-entry-positive sign convention.
ActiveSubspace estimate_subspace(const GradientSampleSet& samples, Eigen::Index n);

/// Spectral-norm distance ||A - B|| after flipping each column of B toward A.
double subspace_distance(const Matrix& a, const Matrix& b);

/// Rotates the basis by a seeded orthogonal transform so that the distance to the
/// original lands in [0.9 epsilon, epsilon]. Requires 0 <= epsilon <= 0.5.
ActiveSubspace perturb_subspace(const ActiveSubspace& subspace, double epsilon, std::uint64_t seed);

struct SensitivityRanking {
  std::vector<Eigen::Index> order;  // 0-based coordinate indices, most sensitive first
  Vector gradient;
  bool zero_gradient = false;
};

/// Coordinates sorted by |df/dx_i| at a point, descending, ties by lowest index.
SensitivityRanking local_sensitivity_ranking(const ModelFunction& model, const Vector& point);

}  // namespace actsub
