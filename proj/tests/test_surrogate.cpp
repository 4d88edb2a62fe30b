#include "actsub/bounds.hpp"
#include "actsub/domain.hpp"
#include "actsub/error.hpp"
#include "actsub/model.hpp"
#include "actsub/surrogate.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace actsub;

namespace {

ReducedDomain identity_domain(Eigen::Index m, Eigen::Index n, const Vector& lambda) {
  return ReducedDomain({InputKind::gaussian_standard, m},
                       ActiveSubspace(Matrix::Identity(m, m), lambda, n));
}

double sample_variance(const std::vector<double>& v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double s = 0.0;
  for (double x : v) s += (x - mean) * (x - mean);
  return s / static_cast<double>(v.size() - 1);
}

}  // namespace

TEST_CASE("ridge surrogate is exact for every N and seed") {
  Vector a(4);
  a << 0.7, 0.3, -0.2, 0.1;
  const auto f = make_ridge(a, RidgeProfile::exp);
  Matrix basis = Matrix::Identity(4, 4);
  basis.col(0) = a.normalized();
  Eigen::HouseholderQR<Matrix> qr(basis);
  Matrix w = qr.householderQ() * Matrix::Identity(4, 4);
  if (w.col(0).dot(a) < 0) w.col(0) *= -1.0;
  const ReducedDomain domain({InputKind::gaussian_standard, 4},
                             ActiveSubspace(w, Vector{{1.0, 0.0, 0.0, 0.0}}, 1));
  for (long n : {1L, 3L, 10L})
    for (std::uint64_t seed : {0ULL, 1ULL, 42ULL}) {
      const Vector y = Vector::Constant(1, 0.4);
      CHECK(evaluate_Ghat(*f, domain, y, {n, seed}) ==
            doctest::Approx(std::exp(a.norm() * 0.4)).epsilon(1e-13));
    }
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal;
  for (int t = 0; t < 10; ++t) {
    Vector x(4);
    for (auto& v : x) v = normal(rng);
    CHECK(evaluate_Fhat(*f, domain, x, {1, 9}) == doctest::Approx(f->value(x)).epsilon(1e-13));
  }
}

TEST_CASE("Monte Carlo average of a small inactive term") {
  const double eps = 0.2;
  const auto f = make_ridge(Vector{{1.0, eps}}, RidgeProfile::identity);
  const auto domain = identity_domain(2, 1, Vector{{1.0, eps * eps}});
  const double g = evaluate_Ghat(*f, domain, Vector::Zero(1), {10000, 5});
  CHECK(std::abs(g) <= 3.0 * eps / 100.0);
}

TEST_CASE("surrogate is deterministic and depends on x only through y") {
  Matrix a = Matrix::Zero(3, 3);
  a.diagonal() << 2.0, 0.5, 0.3;
  const auto f = make_quadratic_form(a);
  const auto domain = identity_domain(3, 1, Vector{{16.0, 1.0, 0.36}});
  const Vector y = Vector::Constant(1, 0.7);
  const double first = evaluate_Ghat(*f, domain, y, {1, 11});
  for (int t = 0; t < 5; ++t) CHECK(evaluate_Ghat(*f, domain, y, {1, 11}) == first);
  const Vector x1{{0.7, 1.0, -2.0}}, x2{{0.7, -0.3, 0.5}};
  CHECK(evaluate_Fhat(*f, domain, x1, {4, 2}) == evaluate_Fhat(*f, domain, x2, {4, 2}));
  CHECK_THROWS_AS(evaluate_Ghat(*f, domain, y, {0, 1}), InvalidInput);
}

TEST_CASE("variance across seeds decays like one over N") {
  Matrix a = Matrix::Zero(3, 3);
  a.diagonal() << 1.0, 0.5, 0.5;
  const auto f = make_quadratic_form(a);
  const auto domain = identity_domain(3, 1, Vector{{4.0, 1.0, 1.0}});
  const Vector y = Vector::Constant(1, 0.3);
  std::vector<double> variances;
  for (long n : {1L, 4L, 16L}) {
    std::vector<double> draws;
    for (std::uint64_t seed = 0; seed < 400; ++seed)
      draws.push_back(evaluate_Ghat(*f, domain, y, {n, 1000 + seed}));
    variances.push_back(sample_variance(draws));
  }
  for (std::size_t i = 1; i < variances.size(); ++i) {
    const double ratio = variances[0] / variances[i];
    const double expected = i == 1 ? 4.0 : 16.0;
    CHECK(ratio >= expected / 2.0);
    CHECK(ratio <= expected * 2.0);
  }
}

TEST_CASE("empirical mean squared error respects the Monte Carlo bound") {
  const Eigen::Index m = 6;
  Matrix a = Matrix::Zero(m, m);
  a.diagonal() << 3.0, 1.0, 0.1, 0.05, 0.0, 0.0;
  const auto f = make_quadratic_form(a);
  const Vector lambda = 4.0 * a.diagonal().array().square().matrix();
  const auto domain = identity_domain(m, 2, lambda);
  std::mt19937_64 rng(21);
  std::normal_distribution<double> normal;
  for (long n : {1L, 4L}) {
    const int count = 10000;
    std::vector<double> sq(count);
    for (int k = 0; k < count; ++k) {
      Vector x(m);
      for (auto& v : x) v = normal(rng);
      const double e = f->value(x) - evaluate_Fhat(*f, domain, x, {n, static_cast<std::uint64_t>(k)});
      sq[static_cast<std::size_t>(k)] = e * e;
    }
    double mean = 0.0;
    for (double s : sq) mean += s;
    mean /= count;
    const double slack = 3.0 * std::sqrt(sample_variance(sq) / count);
    BoundInputs b;
    b.eigenvalues = lambda;
    b.n = 2;
    b.mc_samples = n;
    CHECK(mean <= bound_monte_carlo(b) + slack);
  }
}

namespace {

class FailingModel final : public ModelFunction {
 public:
  Eigen::Index dimension() const override { return 2; }
  InputDomain input_domain() const override { return {InputKind::gaussian_standard, 2}; }
  std::string name() const override { return "failing"; }
  double value(const Vector&) const override { throw NumericalError("solver breakdown"); }
  ValueGradient value_and_gradient(const Vector& x) const override { return {value(x), x}; }
};

}  // namespace

TEST_CASE("model failures carry the offending point") {
  const FailingModel f;
  const auto domain = identity_domain(2, 1, Vector{{4.0, 4.0}});
  try {
    evaluate_Ghat(f, domain, Vector::Constant(1, 0.5), {1, 0});
    FAIL("expected NumericalError");
  } catch (const NumericalError& e) {
    const std::string what = e.what();
    CHECK(what.find("solver breakdown") != std::string::npos);
    CHECK(what.find("at x = [0.5") != std::string::npos);
  }
}
