#include "actsub/error.hpp"
#include "actsub/kriging.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace actsub;

namespace {

Matrix line_design(int count, double lo, double hi) {
  return Vector::LinSpaced(count, lo, hi);
}

Matrix grid_design(int k) {
  Matrix d(k * k, 2);
  const Vector axis = Vector::LinSpaced(k, -3.0, 3.0);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) d.row(i * k + j) << axis(i), axis(j);
  return d;
}

/// A draw from the prior with covariance sigma^2 K + eta^2 I built from alpha.
Vector prior_draw(const Matrix& design, const Vector& lambda, Eigen::Index n, double alpha,
                  std::mt19937_64& rng) {
  const auto h = hyperparameters_from_eigenvalues(lambda, n, alpha);
  const auto p = design.rows();
  Matrix cov(p, p);
  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = 0; j < p; ++j)
      cov(i, j) = h.sigma2 * kernel(design.row(i).transpose(), design.row(j).transpose(), h.lengths);
  cov.diagonal().array() += h.eta2 + 1e-10;
  const Matrix l = cov.llt().matrixL();
  std::normal_distribution<double> normal;
  Vector e(p);
  for (auto& v : e) v = normal(rng);
  return l * e;
}

}  // namespace

TEST_CASE("kernel examples") {
  const Vector l1 = Vector::Constant(1, 0.7);
  CHECK(kernel(Vector::Constant(1, 0.3), Vector::Constant(1, 0.3), l1) == 1.0);
  CHECK(kernel(Vector::Zero(1), Vector::Constant(1, 0.7), l1) == doctest::Approx(std::exp(-0.5)).epsilon(1e-14));
  const Vector l2{{0.5, 2.0}};
  CHECK(kernel(Vector::Zero(2), l2, l2) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
  const Vector a{{0.1, -0.4}}, b{{1.3, 0.2}};
  CHECK(kernel(a, b, l2) == kernel(b, a, l2));
  CHECK(kernel(a, b, l2) > 0.0);
  CHECK(kernel(a, b, l2) <= 1.0);
}

TEST_CASE("hyperparameter heuristic examples") {
  const auto h = hyperparameters_from_eigenvalues(Vector{{4.0, 1.0}}, 1, 1.0);
  CHECK(h.sigma2 == 5.0);
  CHECK(h.length_squares(0) == 1.25);
  CHECK(h.eta2 == 1.0);
  CHECK(hyperparameters_from_eigenvalues(Vector{{1.0, 0.0}}, 1, 1.0).eta2 == 0.0);

  const Vector lambda{{5.0, 2.0, 0.3, 0.1}};
  const auto base = hyperparameters_from_eigenvalues(lambda, 2, 0.4);
  const auto scaled = hyperparameters_from_eigenvalues(lambda, 2, 1.2);
  CHECK(scaled.sigma2 == doctest::Approx(3.0 * base.sigma2));
  CHECK(scaled.eta2 == doctest::Approx(3.0 * base.eta2));
  for (Eigen::Index i = 0; i < 2; ++i)
    CHECK(scaled.lengths(i) * scaled.lengths(i) == doctest::Approx(3.0 * base.lengths(i) * base.lengths(i)));
  CHECK(base.lengths(0) <= base.lengths(1));

  CHECK_THROWS_AS(hyperparameters_from_eigenvalues(Vector{{1.0, 0.0, 0.0}}, 2, 1.0), DegenerateInput);
  CHECK_THROWS_AS(hyperparameters_from_eigenvalues(Vector{{1.0, 0.5}}, 1, 0.0), InvalidInput);
}

TEST_CASE("alpha bracket examples") {
  const InputDomain gaussian{InputKind::gaussian_standard, 2};
  const auto b = alpha_bracket(1.0, Vector{{4.0, 1.0}}, gaussian);
  CHECK(b.lower == doctest::Approx(0.2));
  CHECK(b.upper == 1.0);
  CHECK(!b.warning);
  CHECK(alpha_bracket(0.0, Vector{{4.0, 1.0}}, gaussian).lower == 0.0);
  const auto u = alpha_bracket(1.0, Vector::Ones(100), {InputKind::uniform_hypercube, 100});
  CHECK(u.upper == doctest::Approx(20.0 / std::numbers::pi).epsilon(1e-14));
  const auto clamped = alpha_bracket(50.0, Vector{{4.0, 1.0}}, gaussian);
  CHECK(clamped.lower == clamped.upper);
  CHECK(clamped.warning);
  CHECK(alpha_bracket(1.0, Vector{{4.0, 1.0}}, gaussian, 3.0).upper == 3.0);
  CHECK_THROWS_AS(alpha_bracket(1.0, Vector::Zero(3), gaussian), DegenerateInput);
}

TEST_CASE("mean basis layout is graded lexicographic") {
  CHECK(mean_basis_size(2, MeanBasis::quadratic) == 6);
  CHECK(mean_basis_size(3, MeanBasis::linear) == 4);
  CHECK(mean_basis_size(5, MeanBasis::constant) == 1);
  const Matrix f = mean_basis_matrix(Matrix{{2.0, 3.0}}, MeanBasis::quadratic);
  CHECK(f == Matrix{{1.0, 2.0, 3.0, 4.0, 6.0, 9.0}});
  CHECK(mean_basis_from_string("linear") == MeanBasis::linear);
  CHECK_THROWS_AS(mean_basis_from_string("cubic"), InvalidInput);
}

TEST_CASE("likelihood is deterministic and sees duplicated points") {
  const Matrix d = line_design(7, -3.0, 3.0);
  Vector t(7);
  for (Eigen::Index i = 0; i < 7; ++i) t(i) = std::sin(d(i, 0)) + 0.1 * d(i, 0) * d(i, 0);
  const Vector lambda{{2.0, 0.5}};
  const double a = log_marginal_likelihood(d, t, lambda, 1, 0.3);
  CHECK(log_marginal_likelihood(d, t, lambda, 1, 0.3) == a);
  Matrix d2(8, 1);
  d2 << d, d(3, 0);
  Vector t2(8);
  t2 << t, t(3);
  const double b = log_marginal_likelihood(d2, t2, lambda, 1, 0.3);
  CHECK(std::isfinite(b));
  CHECK(b != a);
}

TEST_CASE("likelihood prefers the generating alpha") {
  const Matrix d = line_design(15, -3.0, 3.0);
  const Vector lambda{{4.0, 1.0, 0.5}};
  const double truth = 0.1;
  std::mt19937_64 rng(31);
  int wins = 0;
  for (int rep = 0; rep < 50; ++rep) {
    const Vector t = prior_draw(d, lambda, 1, truth, rng);
    if (log_marginal_likelihood(d, t, lambda, 1, truth) > log_marginal_likelihood(d, t, lambda, 1, 10.0 * truth))
      ++wins;
  }
  CHECK(wins >= 45);
}

TEST_CASE("maximum likelihood recovers the generating alpha") {
  const Matrix d = line_design(30, -3.0, 3.0);
  const Vector lambda{{4.0, 1.0, 0.5}};
  const double truth = 0.1;
  const InputDomain domain{InputKind::gaussian_standard, 3};
  std::mt19937_64 rng(32);
  int close = 0;
  for (int rep = 0; rep < 50; ++rep) {
    const Vector t = prior_draw(d, lambda, 1, truth, rng);
    const auto model = fit_kriging(d, t, lambda, 1, 0.0, domain);
    const double alpha = model.hyperparameters().alpha;
    CHECK(alpha >= model.bracket().lower);
    CHECK(alpha <= model.bracket().upper);
    if (alpha >= truth / 3.0 && alpha <= 3.0 * truth) ++close;
  }
  CHECK(close >= 40);
}

TEST_CASE("noise-free fit reproduces a quadratic") {
  const Matrix d = grid_design(3);
  auto quad = [](double a, double b) { return 1.0 + 0.5 * a - b + 0.3 * a * a + 0.2 * a * b - 0.1 * b * b; };
  Vector t(d.rows());
  for (Eigen::Index i = 0; i < d.rows(); ++i) t(i) = quad(d(i, 0), d(i, 1));
  const Vector lambda{{2.0, 1.0, 0.0}};
  const auto model = fit_kriging(d, t, lambda, 2, biased_variance(t), {InputKind::gaussian_standard, 3});
  CHECK(model.hyperparameters().eta2 == 0.0);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int k = 0; k < 50; ++k) {
    const Vector y{{u(rng), u(rng)}};
    CHECK(std::abs(model.predict_mean(y) - quad(y(0), y(1))) <= 1e-8);
  }
}

TEST_CASE("interpolation holds exactly when the tail vanishes") {
  const Matrix d = line_design(6, -3.0, 3.0);
  Vector t(6);
  for (Eigen::Index i = 0; i < 6; ++i) t(i) = std::exp(0.4 * d(i, 0)) + std::sin(2.0 * d(i, 0));
  const KrigingModel exact(d, t, Vector{{1.0, 0.0}}, 1, 0.5);
  for (Eigen::Index i = 0; i < 6; ++i)
    CHECK(std::abs(exact.predict_mean(d.row(i).transpose()) - t(i)) <= 1e-8);
  const KrigingModel smooth(d, t, Vector{{1.0, 0.2}}, 1, 0.5);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < 6; ++i)
    worst = std::max(worst, std::abs(smooth.predict_mean(d.row(i).transpose()) - t(i)));
  CHECK(worst > 1e-8);
}

TEST_CASE("smoothing residuals stay within the noise scale") {
  const Matrix d = line_design(25, -3.0, 3.0);
  const double noise = 0.05;
  std::mt19937_64 rng(12);
  std::normal_distribution<double> normal;
  Vector t(25);
  for (Eigen::Index i = 0; i < 25; ++i) t(i) = std::tanh(d(i, 0)) + noise * normal(rng);
  const Vector lambda{{1.0, noise * noise}};
  const KrigingModel model(d, t, lambda, 1, 1.0);
  double rss = 0.0;
  for (Eigen::Index i = 0; i < 25; ++i) {
    const double r = model.predict_mean(d.row(i).transpose()) - t(i);
    rss += r * r;
  }
  CHECK(std::sqrt(rss / 25.0) <= 3.0 * noise);
}

TEST_CASE("far from the design the prediction is the mean surface") {
  const Matrix d = grid_design(3);
  Vector t(9);
  for (Eigen::Index i = 0; i < 9; ++i) t(i) = std::cos(d(i, 0)) + d(i, 1);
  const KrigingModel model(d, t, Vector{{2.0, 1.0, 0.1}}, 2, 0.5);
  const double reach = 10.0 * model.hyperparameters().lengths.maxCoeff();
  const Vector y{{3.0 + reach, -3.0 - reach}};
  for (Eigen::Index i = 0; i < 9; ++i)
    CHECK(kernel(y, d.row(i).transpose(), model.hyperparameters().lengths) < 1e-10);
  const double mean = (mean_basis_matrix(y.transpose(), MeanBasis::quadratic) *
                       model.process().mean_coefficients())(0);
  CHECK(std::abs(model.predict_mean(y) - mean) <= 1e-10 * std::max(1.0, std::abs(mean)));
}

TEST_CASE("predictive variance is non-negative") {
  const Matrix d = grid_design(4);
  Vector t(16);
  for (Eigen::Index i = 0; i < 16; ++i) t(i) = d(i, 0) * d(i, 1);
  const KrigingModel model(d, t, Vector{{2.0, 1.0, 0.05}}, 2, 0.7);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int k = 0; k < 100; ++k) CHECK(model.predict(Vector{{u(rng), u(rng)}}).variance >= 0.0);
  for (Eigen::Index i = 0; i < 16; ++i) CHECK(model.predict(d.row(i).transpose()).variance >= 0.0);
}

TEST_CASE("prediction is invariant under permutation of the training pairs") {
  const Matrix d = grid_design(3);
  Vector t(9);
  for (Eigen::Index i = 0; i < 9; ++i) t(i) = std::exp(0.2 * d(i, 0)) - 0.1 * d(i, 1);
  const std::vector<int> perm = {4, 7, 0, 8, 2, 5, 1, 6, 3};
  Matrix dp(9, 2);
  Vector tp(9);
  for (int i = 0; i < 9; ++i) {
    dp.row(i) = d.row(perm[static_cast<std::size_t>(i)]);
    tp(i) = t(perm[static_cast<std::size_t>(i)]);
  }
  const Vector lambda{{2.0, 1.0, 0.1}};
  const KrigingModel a(d, t, lambda, 2, 0.6), b(dp, tp, lambda, 2, 0.6);
  for (const Vector& y : {Vector{{0.3, -1.2}}, Vector{{2.5, 2.5}}, Vector{{-4.0, 1.0}}}) {
    CHECK(a.predict(y).mean == doctest::Approx(b.predict(y).mean).epsilon(1e-10));
    CHECK(a.predict(y).variance == doctest::Approx(b.predict(y).variance).epsilon(1e-8));
  }
}

TEST_CASE("local correlation expansion follows the eigenvalue ratio") {
  const Vector lambda{{3.0, 1.5, 0.4, 0.1}};
  const auto h = hyperparameters_from_eigenvalues(lambda, 3, 0.8);
  const double delta = 1e-3;
  const Vector y{{0.2, -0.5, 1.0}};
  for (Eigen::Index i = 0; i < 3; ++i) {
    const Vector shifted = y + delta * Vector::Unit(3, i);
    const double ratio = (1.0 - kernel(y, shifted, h.lengths)) / (delta * delta);
    CHECK(ratio == doctest::Approx(lambda(i) / (2.0 * h.sigma2)).epsilon(1e-4));
  }
}

TEST_CASE("non-poised designs are rejected") {
  const Matrix d = line_design(2, -1.0, 1.0);
  CHECK_THROWS_AS(KrigingModel(d, Vector{{0.0, 1.0}}, Vector{{1.0, 0.1}}, 1, 0.5), InvalidInput);
  Matrix collinear(6, 2);
  for (int i = 0; i < 6; ++i) collinear.row(i) << i, 2.0 * i;
  CHECK_THROWS_AS(KrigingModel(collinear, Vector::Ones(6), Vector{{1.0, 0.5, 0.1}}, 2, 0.5), InvalidInput);
}

TEST_CASE("process-variance amplitude scales the kernel") {
  const Matrix d = line_design(5, -3.0, 3.0);
  Vector t(5);
  for (Eigen::Index i = 0; i < 5; ++i) t(i) = std::sin(d(i, 0));
  const Vector lambda{{2.0, 0.2}};
  const KrigingModel unit(d, t, lambda, 1, 0.5, MeanBasis::quadratic, KernelAmplitude::unit);
  const KrigingModel scaled(d, t, lambda, 1, 0.5);
  CHECK(unit.process().amplitude() == 1.0);
  CHECK(scaled.process().amplitude() == doctest::Approx(unit.hyperparameters().sigma2));
  CHECK(kernel_amplitude_from_string(to_string(KernelAmplitude::process_variance)) ==
        KernelAmplitude::process_variance);
}

TEST_CASE("isotropic fit interpolates smooth data closely") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> normal;
  Matrix d(40, 3);
  for (Eigen::Index i = 0; i < d.size(); ++i) d.data()[i] = normal(rng);
  Vector t(40);
  for (Eigen::Index i = 0; i < 40; ++i) t(i) = std::sin(d(i, 0)) + 0.5 * d(i, 1);
  const auto fit = fit_isotropic(d, t, MeanBasis::linear);
  CHECK(fit.length > 0.0);
  CHECK(fit.nugget_ratio >= 0.0);
  const Vector y{{0.1, 0.2, -0.3}};
  CHECK(fit.process.predict_mean(y) == doctest::Approx(std::sin(0.1) + 0.1).epsilon(0.05));
}
