#include "actsub/elliptic.hpp"
#include "actsub/kernels.hpp"
#include "actsub/model.hpp"

#include <doctest.h>

#include <random>

using namespace actsub;

namespace {

Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Matrix a(rows, cols);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = normal(rng);
  return a;
}

}  // namespace

TEST_CASE("weighted correlation kernels agree bitwise") {
  const Matrix nodes = gaussian_matrix(150, 2, 1);
  const Vector w = gaussian_matrix(150, 1, 2).cwiseAbs();
  const Matrix a = kernels::weighted_correlation_serial(nodes, w, 0.3);
  const Matrix b = kernels::weighted_correlation_parallel(nodes, w, 0.3);
  CHECK(a == b);
  CHECK((a - a.transpose()).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("gradient sampling kernels agree bitwise") {
  const auto model = make_elliptic(17, 1.0, 10);
  const Matrix points = gaussian_matrix(10, 12, 3);
  const auto a = kernels::sample_gradients_serial(*model, points);
  const auto b = kernels::sample_gradients_parallel(*model, points);
  CHECK(a.points == b.points);
  CHECK(a.values == b.values);
  CHECK(a.gradients == b.gradients);
  CHECK(kernels::evaluate_values_serial(*model, points) == kernels::evaluate_values_parallel(*model, points));
  CHECK(kernels::evaluate_values_serial(*model, points) == a.values);
}

TEST_CASE("squared exponential gram kernels agree bitwise") {
  const Matrix x = gaussian_matrix(80, 5, 4);
  const Matrix y = gaussian_matrix(60, 5, 5);
  const Vector l = gaussian_matrix(5, 1, 6).cwiseAbs().array() + 0.5;
  const Matrix a = kernels::squared_exponential_gram_serial(x, y, l);
  CHECK(a == kernels::squared_exponential_gram_parallel(x, y, l));
  CHECK(a.rows() == 80);
  CHECK(a.cols() == 60);
  CHECK((a.array() > 0.0).all());
  CHECK((a.array() <= 1.0).all());
}
