#include "actsub/subspace.hpp"

#include "actsub/error.hpp"
#include "actsub/model.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

namespace actsub {

void normalize_column_signs(Matrix& columns) {
  for (Eigen::Index j = 0; j < columns.cols(); ++j) {
    Eigen::Index best = 0;
    double best_abs = -1.0;
    for (Eigen::Index i = 0; i < columns.rows(); ++i) {
      const double v = std::abs(columns(i, j));
      if (v > best_abs) {
        best_abs = v;
        best = i;
      }
    }
    if (columns.rows() > 0 && columns(best, j) < 0.0) columns.col(j) *= -1.0;
  }
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

void GradientSampleSet::validate() const {
  const auto m = points.rows();
  const auto count = points.cols();
  if (count < 1) throw InvalidInput("gradient sample set is empty");
  if (m < 1) throw InvalidInput("gradient sample set has zero input dimension");
  if (gradients.rows() != m || gradients.cols() != count || values.size() != count)
    throw InvalidInput("gradient sample set has inconsistent shapes");
  for (Eigen::Index j = 0; j < count; ++j) {
    if (!points.col(j).allFinite())
      throw InvalidInput("non-finite input point in sample " + std::to_string(j));
    if (!std::isfinite(values(j)))
      throw InvalidInput("non-finite function value in sample " + std::to_string(j));
    if (!gradients.col(j).allFinite())
      throw InvalidInput("non-finite gradient entry in sample " + std::to_string(j));
  }
}

ActiveSubspace::ActiveSubspace(Matrix basis, Vector eigenvalues, Eigen::Index n)
    : basis_(std::move(basis)), eigenvalues_(std::move(eigenvalues)), n_(n) {
  const auto m = basis_.rows();
  if (basis_.cols() != m || eigenvalues_.size() != m)
    throw InvalidInput("active subspace basis must be m x m with m eigenvalues");
  if (n_ < 1 || n_ >= m)
    throw InvalidInput("partition index n=" + std::to_string(n_) + " outside [1, " +
                       std::to_string(m - 1) + "]");
  const double ortho = (basis_.transpose() * basis_ - Matrix::Identity(m, m)).norm();
  if (!(ortho <= 1e-10)) throw InvalidInput("active subspace basis is not orthonormal");
  for (Eigen::Index i = 0; i < m; ++i) {
    double& lam = eigenvalues_(i);
    if (!std::isfinite(lam)) throw InvalidInput("non-finite eigenvalue");
    if (lam < 0.0) {
      if (lam < -1e-12) throw InvalidInput("negative eigenvalue " + std::to_string(lam));
      lam = 0.0;
    }
    if (i > 0 && lam > eigenvalues_(i - 1) * (1.0 + 1e-12) + 1e-300)
      throw InvalidInput("eigenvalues are not in descending order");
  }
}

ActiveSubspace ActiveSubspace::repartition(Eigen::Index n) const {
  return ActiveSubspace(basis_, eigenvalues_, n);
}

Matrix assemble_gradient_matrix(const GradientSampleSet& samples) {
  if (samples.count() < 1) throw InvalidInput("gradient sample set is empty");
  for (Eigen::Index j = 0; j < samples.gradients.cols(); ++j) {
    if (!samples.gradients.col(j).allFinite())
      throw InvalidInput("non-finite gradient entry in sample " + std::to_string(j));
  }
  return samples.gradients / std::sqrt(static_cast<double>(samples.count()));
}

ActiveSubspace estimate_subspace(const GradientSampleSet& samples, Eigen::Index n) {
  samples.validate();
  const auto m = samples.dimension();
  if (n < 1 || n >= m)
    throw InvalidInput("partition index n=" + std::to_string(n) + " outside [1, " +
                       std::to_string(m - 1) + "]");
  const Matrix g = assemble_gradient_matrix(samples);
  if (g.cwiseAbs().maxCoeff() == 0.0)
    throw DegenerateInput("all sampled gradients are zero; the subspace is undetermined");

  Eigen::JacobiSVD<Matrix> svd(g, Eigen::ComputeFullU);
  Matrix basis = svd.matrixU();
  normalize_column_signs(basis);

  Vector eigenvalues = Vector::Zero(m);
  const Vector& sv = svd.singularValues();
  for (Eigen::Index i = 0; i < sv.size(); ++i) eigenvalues(i) = sv(i) * sv(i);
  return ActiveSubspace(std::move(basis), std::move(eigenvalues), n);
}

double subspace_distance(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw InvalidInput("subspace_distance: shape mismatch");
  const auto k = a.cols();
  const Matrix eye = Matrix::Identity(k, k);
  if ((a.transpose() * a - eye).cwiseAbs().maxCoeff() > 1e-8 ||
      (b.transpose() * b - eye).cwiseAbs().maxCoeff() > 1e-8)
    throw InvalidInput("subspace_distance: columns are not orthonormal");

  Matrix diff = a - b;
  for (Eigen::Index j = 0; j < k; ++j) {
    if (a.col(j).dot(b.col(j)) < 0.0) diff.col(j) = a.col(j) + b.col(j);
  }
  Eigen::JacobiSVD<Matrix> svd(diff);
  return svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0;
}

namespace {

struct GivensPair {
  Eigen::Index p;
  Eigen::Index q;
  double rate;
};

Matrix rotate_pairs(const Matrix& basis, const std::vector<GivensPair>& pairs, double t) {
  Matrix out = basis;
  for (const auto& pr : pairs) {
    const double c = std::cos(t * pr.rate);
    const double s = std::sin(t * pr.rate);
    out.col(pr.p) = c * basis.col(pr.p) + s * basis.col(pr.q);
    out.col(pr.q) = -s * basis.col(pr.p) + c * basis.col(pr.q);
  }
  return out;
}

}  // namespace

ActiveSubspace perturb_subspace(const ActiveSubspace& subspace, double epsilon,
                                std::uint64_t seed) {
  if (!(epsilon >= 0.0 && epsilon <= 0.5))
    throw InvalidInput("perturbation epsilon must lie in [0, 0.5]");
  if (epsilon == 0.0) return subspace;

  const auto m = subspace.dimension();
  const auto n = subspace.active_dimension();
  std::mt19937_64 rng(seed);

  // One pair always couples an active and an inactive column so the rotation moves W1;
  // the remaining columns are paired at random with slower rates.
  std::uniform_int_distribution<Eigen::Index> pick_active(0, n - 1);
  std::uniform_int_distribution<Eigen::Index> pick_inactive(n, m - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto sign = [&] { return unit(rng) < 0.5 ? -1.0 : 1.0; };

  std::vector<GivensPair> pairs;
  const Eigen::Index lead_p = pick_active(rng);
  const Eigen::Index lead_q = pick_inactive(rng);
  pairs.push_back({lead_p, lead_q, sign()});

  std::vector<Eigen::Index> rest;
  for (Eigen::Index i = 0; i < m; ++i)
    if (i != lead_p && i != lead_q) rest.push_back(i);
  std::shuffle(rest.begin(), rest.end(), rng);
  for (std::size_t i = 0; i + 1 < rest.size(); i += 2)
    pairs.push_back({rest[i], rest[i + 1], sign() * (0.25 + 0.75 * unit(rng))});

  const Matrix& basis = subspace.basis();
  const double target_lo = 0.9 * epsilon;
  double lo = 0.0;
  double hi = 2.0 * std::asin(0.5 * epsilon) * 1.5 + 1e-3;
  Matrix rotated = basis;
  for (int iter = 0; iter < 200; ++iter) {
    const double t = 0.5 * (lo + hi);
    rotated = rotate_pairs(basis, pairs, t);
    const double d = subspace_distance(basis, rotated);
    if (d > epsilon) {
      hi = t;
    } else if (d < target_lo) {
      lo = t;
    } else {
      return ActiveSubspace(std::move(rotated), subspace.eigenvalues(), n);
    }
  }
  throw NumericalError("perturb_subspace: bisection did not reach the distance bracket");
}

SensitivityRanking local_sensitivity_ranking(const ModelFunction& model, const Vector& point) {
  if (point.size() != model.dimension())
    throw InvalidInput("local_sensitivity_ranking: point has wrong dimension");
  SensitivityRanking out;
  out.gradient = model.value_and_gradient(point).gradient;
  out.order.resize(static_cast<std::size_t>(out.gradient.size()));
  std::iota(out.order.begin(), out.order.end(), Eigen::Index{0});
  std::stable_sort(out.order.begin(), out.order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return std::abs(out.gradient(a)) > std::abs(out.gradient(b));
  });
  out.zero_gradient = out.gradient.cwiseAbs().maxCoeff() == 0.0;
  return out;
}

}  // namespace actsub
