#include "actsub/kernels.hpp"

#include "actsub/error.hpp"

#include <cmath>
#include <exception>
#include <mutex>

namespace actsub::kernels {

namespace {

inline double correlation_entry(const Matrix& nodes, const Vector& sw, double inv_beta,
                                Eigen::Index j, Eigen::Index k) {
  const double d = std::abs(nodes(j, 0) - nodes(k, 0)) + std::abs(nodes(j, 1) - nodes(k, 1));
  return sw(j) * std::exp(-d * inv_beta) * sw(k);
}

inline double se_entry(const Matrix& a, const Matrix& b, const Vector& inv2l2, Eigen::Index r,
                       Eigen::Index s) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < a.cols(); ++i) {
    const double d = a(r, i) - b(s, i);
    acc += d * d * inv2l2(i);
  }
  return std::exp(-acc);
}

void check_nodes(const Matrix& nodes, const Vector& sqrt_weights, double beta) {
  if (nodes.cols() != 2 || nodes.rows() != sqrt_weights.size())
    throw InvalidInput("weighted_correlation: nodes must be N x 2 with N weights");
  if (!(beta > 0.0)) throw InvalidInput("weighted_correlation: beta must be positive");
}

Vector inverse_two_l2(const Matrix& a, const Matrix& b, const Vector& lengths) {
  if (a.cols() != b.cols() || a.cols() != lengths.size())
    throw InvalidInput("squared_exponential_gram: dimension mismatch");
  if ((lengths.array() <= 0.0).any() || !lengths.allFinite())
    throw InvalidInput("squared_exponential_gram: lengths must be positive and finite");
  return (0.5 / lengths.array().square()).matrix();
}

GradientSampleSet empty_set(const ModelFunction& model, const Matrix& points) {
  if (points.rows() != model.dimension())
    throw InvalidInput("sample_gradients: points have the wrong dimension");
  GradientSampleSet out;
  out.points = points;
  out.values.resize(points.cols());
  out.gradients.resize(points.rows(), points.cols());
  return out;
}

}  // namespace

Matrix weighted_correlation_serial(const Matrix& nodes, const Vector& sqrt_weights, double beta) {
  check_nodes(nodes, sqrt_weights, beta);
  const auto n = nodes.rows();
  const double inv_beta = 1.0 / beta;
  Matrix c(n, n);
  for (Eigen::Index k = 0; k < n; ++k)
    for (Eigen::Index j = 0; j < n; ++j) c(j, k) = correlation_entry(nodes, sqrt_weights, inv_beta, j, k);
  return c;
}

Matrix weighted_correlation_parallel(const Matrix& nodes, const Vector& sqrt_weights, double beta) {
  check_nodes(nodes, sqrt_weights, beta);
  const auto n = nodes.rows();
  const double inv_beta = 1.0 / beta;
  Matrix c(n, n);
#pragma omp parallel for schedule(static)
  for (Eigen::Index k = 0; k < n; ++k)
    for (Eigen::Index j = 0; j < n; ++j) c(j, k) = correlation_entry(nodes, sqrt_weights, inv_beta, j, k);
  return c;
}

GradientSampleSet sample_gradients_serial(const ModelFunction& model, const Matrix& points) {
  GradientSampleSet out = empty_set(model, points);
  for (Eigen::Index j = 0; j < points.cols(); ++j) {
    auto vg = model.value_and_gradient(points.col(j));
    out.values(j) = vg.value;
    out.gradients.col(j) = vg.gradient;
  }
  return out;
}

GradientSampleSet sample_gradients_parallel(const ModelFunction& model, const Matrix& points) {
  GradientSampleSet out = empty_set(model, points);
  std::exception_ptr failure;
  std::mutex failure_lock;
#pragma omp parallel for schedule(dynamic)
  for (Eigen::Index j = 0; j < points.cols(); ++j) {
    try {
      auto vg = model.value_and_gradient(points.col(j));
      out.values(j) = vg.value;
      out.gradients.col(j) = vg.gradient;
    } catch (...) {
      std::lock_guard<std::mutex> guard(failure_lock);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

Vector evaluate_values_serial(const ModelFunction& model, const Matrix& points) {
  if (points.rows() != model.dimension())
    throw InvalidInput("evaluate_values: points have the wrong dimension");
  Vector out(points.cols());
  for (Eigen::Index j = 0; j < points.cols(); ++j) out(j) = model.value(points.col(j));
  return out;
}

Vector evaluate_values_parallel(const ModelFunction& model, const Matrix& points) {
  if (points.rows() != model.dimension())
    throw InvalidInput("evaluate_values: points have the wrong dimension");
  Vector out(points.cols());
  std::exception_ptr failure;
  std::mutex failure_lock;
#pragma omp parallel for schedule(dynamic)
  for (Eigen::Index j = 0; j < points.cols(); ++j) {
    try {
      out(j) = model.value(points.col(j));
    } catch (...) {
      std::lock_guard<std::mutex> guard(failure_lock);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

Matrix squared_exponential_gram_serial(const Matrix& a, const Matrix& b, const Vector& lengths) {
  const Vector inv2l2 = inverse_two_l2(a, b, lengths);
  Matrix k(a.rows(), b.rows());
  for (Eigen::Index s = 0; s < b.rows(); ++s)
    for (Eigen::Index r = 0; r < a.rows(); ++r) k(r, s) = se_entry(a, b, inv2l2, r, s);
  return k;
}

Matrix squared_exponential_gram_parallel(const Matrix& a, const Matrix& b, const Vector& lengths) {
  const Vector inv2l2 = inverse_two_l2(a, b, lengths);
  Matrix k(a.rows(), b.rows());
#pragma omp parallel for schedule(static)
  for (Eigen::Index s = 0; s < b.rows(); ++s)
    for (Eigen::Index r = 0; r < a.rows(); ++r) k(r, s) = se_entry(a, b, inv2l2, r, s);
  return k;
}

}  // namespace actsub::kernels
