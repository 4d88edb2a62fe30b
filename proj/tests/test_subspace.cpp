#include "actsub/error.hpp"
#include "actsub/model.hpp"
#include "actsub/subspace.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace actsub;

namespace {

GradientSampleSet from_gradients(const Matrix& gradients) {
  GradientSampleSet s;
  s.points = Matrix::Zero(gradients.rows(), gradients.cols());
  s.values = Vector::Zero(gradients.cols());
  s.gradients = gradients;
  return s;
}

GradientSampleSet sample(const ModelFunction& f, long count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  const auto m = f.dimension();
  GradientSampleSet s;
  s.points.resize(m, count);
  s.values.resize(count);
  s.gradients.resize(m, count);
  for (long j = 0; j < count; ++j) {
    for (Eigen::Index i = 0; i < m; ++i) s.points(i, j) = normal(rng);
    const auto vg = f.value_and_gradient(s.points.col(j));
    s.values(j) = vg.value;
    s.gradients.col(j) = vg.gradient;
  }
  return s;
}

Matrix random_gradients(Eigen::Index m, long count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Matrix g(m, count);
  for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = normal(rng);
  return g;
}

Vector padded(std::initializer_list<double> head, Eigen::Index m) {
  Vector v = Vector::Zero(m);
  Eigen::Index i = 0;
  for (double h : head) v(i++) = h;
  return v;
}

}  // namespace

TEST_CASE("gradient matrix scales columns by one over root M") {
  Matrix g1(2, 1);
  g1 << 2, 0;
  CHECK(assemble_gradient_matrix(from_gradients(g1)).isApprox(g1));

  Matrix g4 = Matrix::Zero(2, 4);
  g4.row(0).setOnes();
  const Matrix a4 = assemble_gradient_matrix(from_gradients(g4));
  CHECK((a4.row(0).array() == 0.5).all());
  CHECK((a4.row(1).array() == 0.0).all());

  Matrix g2(2, 2);
  g2 << 1, 1, 1, -1;
  const Matrix a2 = assemble_gradient_matrix(from_gradients(g2));
  CHECK((a2 * a2.transpose() - Matrix::Identity(2, 2)).norm() < 1e-15);
}

TEST_CASE("non-finite gradient is rejected with the sample index") {
  Matrix g = Matrix::Ones(2, 3);
  g(1, 2) = std::nan("");
  try {
    assemble_gradient_matrix(from_gradients(g));
    FAIL("expected InvalidInput");
  } catch (const InvalidInput& e) {
    CHECK(std::string(e.what()).find('2') != std::string::npos);
  }
}

TEST_CASE("single gradient of a ridge recovers its direction") {
  const auto f = make_ridge(padded({0.7, 0.3}, 10), RidgeProfile::exp);
  const auto s = sample(*f, 1, 11);
  const auto sub = estimate_subspace(s, 1);
  Vector a = padded({0.7, 0.3}, 10);
  a.normalize();
  CHECK(std::abs(sub.basis()(0, 0) - 0.7 / std::sqrt(0.58)) < 1e-12);
  CHECK(std::abs(sub.basis()(1, 0) - 0.3 / std::sqrt(0.58)) < 1e-12);
  CHECK(subspace_distance(a, sub.active_basis()) <= 1e-10);
  for (Eigen::Index i = 1; i < 10; ++i) CHECK(sub.eigenvalues()(i) == 0.0);
}

TEST_CASE("orthogonal gradient pair yields the identity outer product") {
  Matrix g(2, 2);
  g << 1, 1, 1, -1;
  const auto sub = estimate_subspace(from_gradients(g), 1);
  CHECK(sub.eigenvalues()(0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sub.eigenvalues()(1) == doctest::Approx(1.0).epsilon(1e-12));
  const Matrix w = sub.basis();
  CHECK((w.transpose() * w - Matrix::Identity(2, 2)).norm() < 1e-12);
  for (Eigen::Index c = 0; c < 2; ++c) {
    Eigen::Index arg = 0;
    w.col(c).cwiseAbs().maxCoeff(&arg);
    CHECK(w(arg, c) > 0.0);
  }
}

TEST_CASE("null space of a rank-deficient quadratic form is recovered") {
  Matrix a = Matrix::Zero(5, 5);
  a.diagonal() << 2.0, 1.0, 0.5, 0.0, 0.0;
  const auto f = make_quadratic_form(a);
  const auto sub = estimate_subspace(sample(*f, 50, 3), 3);
  CHECK(sub.eigenvalues()(3) < 1e-20);
  CHECK(sub.eigenvalues()(4) < 1e-20);
  Matrix null(5, 2);
  null.setZero();
  null(3, 0) = 1.0;
  null(4, 1) = 1.0;
  const Matrix proj = sub.inactive_basis() * sub.inactive_basis().transpose();
  CHECK((proj * null - null).norm() < 1e-10);
}

TEST_CASE("estimate_subspace rejects bad n and all-zero gradients") {
  const Matrix g = random_gradients(3, 4, 1);
  CHECK_THROWS_AS(estimate_subspace(from_gradients(g), 0), InvalidInput);
  CHECK_THROWS_AS(estimate_subspace(from_gradients(g), 3), InvalidInput);
  CHECK_THROWS_AS(estimate_subspace(from_gradients(Matrix::Zero(3, 4)), 1), DegenerateInput);
}

TEST_CASE("subspace properties hold on random gradient sets") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Eigen::Index m = 2 + static_cast<Eigen::Index>(seed % 7);
    const long count = 1 + static_cast<long>((seed * 5) % 13);
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(seed % static_cast<std::uint64_t>(m - 1));
    const auto s = from_gradients(random_gradients(m, count, seed));
    const auto sub = estimate_subspace(s, n);
    const Matrix& w = sub.basis();
    const Vector& lambda = sub.eigenvalues();
    const Matrix g = assemble_gradient_matrix(s);
    const Matrix c = g * g.transpose();
    CAPTURE(seed);
    CHECK((w.transpose() * w - Matrix::Identity(m, m)).norm() <= 1e-10);
    for (Eigen::Index i = 1; i < m; ++i) CHECK(lambda(i - 1) >= lambda(i));
    for (Eigen::Index i = std::min<Eigen::Index>(count, m); i < m; ++i) CHECK(lambda(i) == 0.0);
    for (Eigen::Index i = 0; i < m; ++i)
      CHECK(std::abs(w.col(i).dot(c * w.col(i)) - lambda(i)) <= 1e-10 * std::max(1.0, lambda(0)));
    const Matrix w1 = sub.active_basis(), w2 = sub.inactive_basis();
    CHECK(std::abs((w1.transpose() * c * w1).trace() - sub.active_sum()) <= 1e-10 * std::max(1.0, lambda(0)));
    CHECK(std::abs((w2.transpose() * c * w2).trace() - sub.tail_sum()) <= 1e-10 * std::max(1.0, lambda(0)));
    CHECK(estimate_subspace(s, n).basis() == w);
  }
}

TEST_CASE("subspace_distance examples") {
  Matrix a(2, 1), b(2, 1);
  a << 1, 0;
  CHECK(subspace_distance(a, a) == 0.0);
  CHECK(subspace_distance(a, -a) == 0.0);
  const double theta = 0.1;
  b << std::cos(theta), std::sin(theta);
  CHECK(subspace_distance(a, b) == doctest::Approx(2.0 * std::abs(std::sin(theta / 2))).epsilon(1e-12));
  CHECK_THROWS_AS(subspace_distance(a, Matrix::Identity(2, 2)), InvalidInput);
}

TEST_CASE("perturb_subspace lands in the distance bracket") {
  const auto sub = estimate_subspace(from_gradients(random_gradients(6, 30, 9)), 2);
  const auto same = perturb_subspace(sub, 0.0, 1);
  CHECK(same.basis() == sub.basis());
  for (double eps : {0.05, 0.1, 0.2, 0.5}) {
    const auto p1 = perturb_subspace(sub, eps, 1);
    const auto p2 = perturb_subspace(sub, eps, 2);
    for (const auto* p : {&p1, &p2}) {
      const double d = subspace_distance(sub.basis(), p->basis());
      CHECK(d <= eps + 1e-12);
      CHECK(d >= 0.9 * eps - 1e-12);
      CHECK((p->basis().transpose() * p->basis() - Matrix::Identity(6, 6)).norm() < 1e-10);
      CHECK(p->eigenvalues() == sub.eigenvalues());
    }
    CHECK((p1.basis() - p2.basis()).norm() > 1e-6);
    CHECK(perturb_subspace(sub, eps, 1).basis() == p1.basis());
  }
  CHECK_THROWS_AS(perturb_subspace(sub, 0.6, 1), InvalidInput);
  CHECK_THROWS_AS(perturb_subspace(sub, -0.1, 1), InvalidInput);
}

TEST_CASE("local sensitivity ranking examples") {
  const auto ridge = make_ridge(padded({0.7, 0.3}, 2), RidgeProfile::exp);
  const auto r = local_sensitivity_ranking(*ridge, Vector::Zero(2));
  CHECK(r.order == std::vector<Eigen::Index>{0, 1});
  CHECK(!r.zero_gradient);
  Vector dx(2);
  dx << 0.1, 0.0;
  CHECK(ridge->value(dx) == doctest::Approx(1.0725).epsilon(1e-4));
  dx << 0.0, 0.1;
  CHECK(ridge->value(dx) == doctest::Approx(1.0305).epsilon(1e-4));

  Matrix a = Matrix::Zero(2, 2);
  a(1, 1) = 1.0;
  const auto flat = local_sensitivity_ranking(*make_quadratic_form(a), Vector::Zero(2));
  CHECK(flat.zero_gradient);
  CHECK(flat.order == std::vector<Eigen::Index>{0, 1});

  Vector c(3);
  c << -2.0, 1.0, 3.0;
  const auto lin = local_sensitivity_ranking(*make_ridge(c, RidgeProfile::identity), Vector::Zero(3));
  CHECK(lin.order == std::vector<Eigen::Index>{2, 0, 1});
}

TEST_CASE("ridge functions are constant along the inactive directions") {
  const auto f = make_ridge(padded({0.7, 0.3, -0.2}, 6), RidgeProfile::exp);
  const auto sub = estimate_subspace(sample(*f, 1, 5), 1);
  std::mt19937_64 rng(17);
  std::normal_distribution<double> normal;
  for (int t = 0; t < 50; ++t) {
    Vector x1(6), z(5);
    for (auto& v : x1) v = normal(rng);
    for (auto& v : z) v = normal(rng);
    const Vector x2 = x1 + sub.inactive_basis() * z;
    const auto a = f->value_and_gradient(x1);
    const auto b = f->value_and_gradient(x2);
    CHECK(std::abs(a.value - b.value) <= 1e-10);
    CHECK((a.gradient - b.gradient).norm() <= 1e-8);
  }
}
