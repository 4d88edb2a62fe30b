#include "actsub/kriging.hpp"

#include "actsub/error.hpp"
#include "actsub/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace actsub {

namespace {

constexpr int kJitterRetries = 3;

void check_lengths(const Vector& lengths) {
  if (lengths.size() == 0 || (lengths.array() <= 0.0).any() || !lengths.allFinite())
    throw InvalidInput("kriging: correlation lengths must be positive and finite");
}

double golden_maximize(const auto& objective, double a, double b, double tolerance) {
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - ratio * (b - a);
  double d = a + ratio * (b - a);
  double fc = objective(c);
  double fd = objective(d);
  while (b - a > tolerance) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - ratio * (b - a);
      fc = objective(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + ratio * (b - a);
      fd = objective(d);
    }
  }
  return fc >= fd ? c : d;
}

Vector log_grid(double lo, double hi, int count) {
  if (count < 2 || lo == hi) return Vector::Constant(1, lo);
  Vector g(count);
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < count; ++i) g(i) = std::exp(a + (b - a) * i / (count - 1));
  return g;
}

}  // namespace

double kernel(const Vector& y1, const Vector& y2, const Vector& lengths) {
  if (y1.size() != y2.size() || y1.size() != lengths.size())
    throw InvalidInput("kernel: dimension mismatch");
  check_lengths(lengths);
  return std::exp(-0.5 * ((y1 - y2).array() / lengths.array()).square().sum());
}

std::string to_string(MeanBasis basis) {
  switch (basis) {
    case MeanBasis::constant:
      return "constant";
    case MeanBasis::linear:
      return "linear";
    case MeanBasis::quadratic:
      return "quadratic";
  }
  return "quadratic";
}

MeanBasis mean_basis_from_string(const std::string& name) {
  if (name == "constant") return MeanBasis::constant;
  if (name == "linear") return MeanBasis::linear;
  if (name == "quadratic") return MeanBasis::quadratic;
  throw InvalidInput("unknown mean basis '" + name + "'");
}

Eigen::Index mean_basis_size(Eigen::Index n, MeanBasis basis) {
  switch (basis) {
    case MeanBasis::constant:
      return 1;
    case MeanBasis::linear:
      return 1 + n;
    case MeanBasis::quadratic:
      return 1 + n + n * (n + 1) / 2;
  }
  return 1;
}

Matrix mean_basis_matrix(const Matrix& points, MeanBasis basis) {
  const auto n = points.cols();
  Matrix f(points.rows(), mean_basis_size(n, basis));
  f.col(0).setOnes();
  if (basis == MeanBasis::constant) return f;
  f.middleCols(1, n) = points;
  if (basis == MeanBasis::linear) return f;
  Eigen::Index col = 1 + n;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j) f.col(col++) = points.col(i).cwiseProduct(points.col(j));
  return f;
}

std::string to_string(KernelAmplitude amplitude) {
  return amplitude == KernelAmplitude::unit ? "unit" : "process_variance";
}

KernelAmplitude kernel_amplitude_from_string(const std::string& name) {
  if (name == "unit") return KernelAmplitude::unit;
  if (name == "process_variance") return KernelAmplitude::process_variance;
  throw InvalidInput("unknown kernel amplitude '" + name + "'");
}

KrigingHyperparameters hyperparameters_from_eigenvalues(const Vector& lambda, Eigen::Index n,
                                                        double alpha) {
  if (n < 1 || n > lambda.size()) throw InvalidInput("kriging: n out of range");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InvalidInput("kriging: alpha must be positive");
  if ((lambda.array() < 0.0).any() || !lambda.allFinite())
    throw InvalidInput("kriging: eigenvalues must be non-negative and finite");
  for (Eigen::Index i = 0; i < n; ++i)
    if (lambda(i) <= 0.0)
      throw DegenerateInput("kriging: eigenvalue " + std::to_string(i + 1) +
                            " is zero, its correlation length would be infinite");
  KrigingHyperparameters h;
  h.alpha = alpha;
  h.sigma2 = alpha * lambda.sum();
  h.length_squares = (h.sigma2 / lambda.head(n).array()).matrix();
  h.lengths = h.length_squares.cwiseSqrt();
  h.eta2 = alpha * lambda.tail(lambda.size() - n).sum();
  return h;
}

AlphaBracket alpha_bracket(double sigma_hat2, const Vector& lambda, const InputDomain& domain,
                           std::optional<double> poincare_constant) {
  const double total = lambda.sum();
  if (!(total > 0.0)) throw DegenerateInput("alpha_bracket: eigenvalues sum to zero");
  if (!(sigma_hat2 >= 0.0)) throw InvalidInput("alpha_bracket: sigma_hat2 must be non-negative");
  AlphaBracket b;
  b.upper = poincare_constant.value_or(default_poincare_constant(domain));
  if (!(b.upper > 0.0)) throw InvalidInput("alpha_bracket: Poincare constant must be positive");
  b.lower = sigma_hat2 / total;
  if (b.lower > b.upper) {
    b.warning = "sample variance implies alpha >= " + std::to_string(b.lower) +
                ", above the Poincare constant " + std::to_string(b.upper) + "; alpha pinned to " +
                std::to_string(b.upper);
    b.lower = b.upper;
  }
  return b;
}

double biased_variance(const Vector& values) {
  if (values.size() == 0) throw InvalidInput("biased_variance: no values");
  return (values.array() - values.mean()).square().mean();
}

GaussianProcess::GaussianProcess(Matrix design, Vector training, Vector lengths, double amplitude,
                                 double nugget, MeanBasis basis)
    : design_(std::move(design)),
      training_(std::move(training)),
      lengths_(std::move(lengths)),
      amplitude_(amplitude),
      nugget_(nugget),
      basis_(basis) {
  const auto p = design_.rows();
  if (p == 0 || training_.size() != p) throw InvalidInput("kriging: design and training sizes differ");
  if (lengths_.size() != design_.cols()) throw InvalidInput("kriging: lengths do not match design");
  if (!design_.allFinite() || !training_.allFinite())
    throw InvalidInput("kriging: design and training values must be finite");
  check_lengths(lengths_);
  if (!(amplitude_ > 0.0) || !(nugget_ >= 0.0)) throw InvalidInput("kriging: bad amplitude or nugget");

  const Matrix f = mean_basis_matrix(design_, basis_);
  if (p < f.cols())
    throw InvalidInput("kriging: " + std::to_string(p) + " design points cannot determine " +
                       std::to_string(f.cols()) + " mean coefficients");
  Eigen::ColPivHouseholderQR<Matrix> qr(f);
  qr.setThreshold(1e-10);
  if (qr.rank() < f.cols()) throw InvalidInput("kriging: design is not poised for the mean basis");

  Matrix sigma = amplitude_ * kernels::squared_exponential_gram_parallel(design_, design_, lengths_);
  sigma.diagonal().array() += nugget_;
  const double base_jitter = 1e-10 * sigma.trace() / static_cast<double>(p);
  cov_chol_.compute(sigma);
  for (int attempt = 0; cov_chol_.info() != Eigen::Success; ++attempt) {
    if (attempt == kJitterRetries)
      throw NumericalError("kriging: covariance is not positive definite after jitter " +
                           std::to_string(jitter_) + "; try a larger nugget");
    const double add = base_jitter * std::pow(10.0, attempt);
    jitter_ += add;
    sigma.diagonal().array() += add;
    cov_chol_.compute(sigma);
  }

  cinv_basis_ = cov_chol_.solve(f);
  gls_chol_.compute(f.transpose() * cinv_basis_);
  if (gls_chol_.info() != Eigen::Success)
    throw NumericalError("kriging: generalized least-squares system is singular");
  beta_ = gls_chol_.solve(cinv_basis_.transpose() * training_);
  const Vector residual = training_ - f * beta_;
  weights_ = cov_chol_.solve(residual);
  if (!beta_.allFinite() || !weights_.allFinite()) throw NumericalError("kriging: solve produced non-finite values");

  residual_quadratic_ = residual.dot(weights_);
  log_determinant_ = 2.0 * cov_chol_.matrixLLT().diagonal().array().log().sum();
  log_likelihood_ = -0.5 * residual_quadratic_ - 0.5 * log_determinant_ -
                    0.5 * static_cast<double>(p) * std::log(2.0 * std::numbers::pi);
}

double GaussianProcess::predict_mean(const Vector& y) const {
  if (y.size() != design_.cols()) throw InvalidInput("kriging: prediction point has wrong dimension");
  const Matrix row = y.transpose();
  const Vector k = amplitude_ * kernels::squared_exponential_gram_serial(design_, row, lengths_).col(0);
  const Vector fy = mean_basis_matrix(row, basis_).row(0).transpose();
  return fy.dot(beta_) + k.dot(weights_);
}

GaussianProcess::Prediction GaussianProcess::predict(const Vector& y) const {
  if (y.size() != design_.cols()) throw InvalidInput("kriging: prediction point has wrong dimension");
  const Matrix row = y.transpose();
  const Vector k = amplitude_ * kernels::squared_exponential_gram_serial(design_, row, lengths_).col(0);
  const Vector fy = mean_basis_matrix(row, basis_).row(0).transpose();
  Prediction out;
  out.mean = fy.dot(beta_) + k.dot(weights_);
  const Vector u = fy - cinv_basis_.transpose() * k;
  const double v = amplitude_ - k.dot(cov_chol_.solve(k)) + u.dot(gls_chol_.solve(u));
  out.variance = std::max(0.0, v);
  return out;
}

void GaussianProcess::restore_coefficients(const Vector& beta, const Vector& weights) {
  if (beta.size() != beta_.size() || weights.size() != weights_.size())
    throw InvalidInput("kriging: stored coefficients do not match the model");
  beta_ = beta;
  weights_ = weights;
}

KrigingModel::KrigingModel(Matrix design, Vector training, Vector lambda, Eigen::Index n, double alpha,
                           MeanBasis basis, KernelAmplitude amplitude)
    : lambda_(std::move(lambda)),
      n_(n),
      amplitude_(amplitude),
      hyper_(hyperparameters_from_eigenvalues(lambda_, n_, alpha)),
      process_(std::move(design), std::move(training), hyper_.lengths,
               amplitude == KernelAmplitude::unit ? 1.0 : hyper_.sigma2, hyper_.eta2, basis) {
  if (process_.design().cols() != n_) throw InvalidInput("kriging: design dimension differs from n");
}

double log_marginal_likelihood(const Matrix& design, const Vector& training, const Vector& lambda,
                               Eigen::Index n, double alpha, MeanBasis basis,
                               KernelAmplitude amplitude) {
  return KrigingModel(design, training, lambda, n, alpha, basis, amplitude).process().log_likelihood();
}

KrigingModel fit_kriging(const Matrix& design, const Vector& training, const Vector& lambda,
                         Eigen::Index n, double sigma_hat2, const InputDomain& domain,
                         const KrigingFitOptions& options) {
  AlphaBracket bracket = alpha_bracket(sigma_hat2, lambda, domain, options.poincare_constant);
  const double hi = bracket.upper;
  const double lo = std::max(bracket.lower, 1e-6 * hi);

  const auto likelihood = [&](double alpha) {
    try {
      return log_marginal_likelihood(design, training, lambda, n, alpha, options.basis, options.amplitude);
    } catch (const NumericalError&) {
      return -std::numeric_limits<double>::infinity();
    }
  };

  const Vector grid = log_grid(lo, hi, options.grid_points);
  Vector values(grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i) values(i) = likelihood(grid(i));
  Eigen::Index best = 0;
  values.maxCoeff(&best);
  double alpha = grid(best);

  if (grid.size() > 1) {
    const double a = std::log(grid(std::max<Eigen::Index>(best - 1, 0)));
    const double b = std::log(grid(std::min<Eigen::Index>(best + 1, grid.size() - 1)));
    // Interval width in log alpha equals the relative width in alpha to first order.
    const double refined = std::exp(golden_maximize(
        [&](double log_alpha) { return likelihood(std::exp(log_alpha)); }, a, b,
        options.relative_tolerance));
    if (likelihood(refined) >= values(best)) alpha = refined;
  }
  if (!std::isfinite(likelihood(alpha)))
    throw NumericalError("kriging: no alpha in the bracket gives a positive definite covariance");

  KrigingModel model(design, training, lambda, n, alpha, options.basis, options.amplitude);
  model.set_bracket(std::move(bracket));
  return model;
}

IsotropicFit fit_isotropic(const Matrix& design, const Vector& training, MeanBasis basis) {
  const auto p = design.rows();
  const auto dim = design.cols();
  double spread = 0.0;
  for (Eigen::Index r = 0; r < p; ++r)
    for (Eigen::Index s = r + 1; s < p; ++s)
      spread = std::max(spread, (design.row(r) - design.row(s)).norm());
  if (!(spread > 0.0)) spread = 1.0;

  const double log_l_lo = std::log(1e-2 * spread), log_l_hi = std::log(10.0 * spread);
  const double log_t_lo = std::log(1e-8), log_t_hi = std::log(1.0);

  // Amplitude profiled out: s^2 = r^T R^{-1} r / P.
  const auto concentrated = [&](double log_l, double log_t) {
    try {
      GaussianProcess gp(design, training, Vector::Constant(dim, std::exp(log_l)), 1.0,
                         std::exp(log_t), basis);
      const double s2 = std::max(gp.residual_quadratic() / static_cast<double>(p), 1e-300);
      return -0.5 * static_cast<double>(p) * std::log(s2) - 0.5 * gp.log_determinant();
    } catch (const NumericalError&) {
      return -std::numeric_limits<double>::infinity();
    }
  };

  double best_l = log_l_lo, best_t = log_t_lo;
  double best = -std::numeric_limits<double>::infinity();
  constexpr int kLengthSteps = 15, kNuggetSteps = 9;
  for (int i = 0; i < kLengthSteps; ++i) {
    const double ll = log_l_lo + (log_l_hi - log_l_lo) * i / (kLengthSteps - 1);
    for (int j = 0; j < kNuggetSteps; ++j) {
      const double lt = log_t_lo + (log_t_hi - log_t_lo) * j / (kNuggetSteps - 1);
      const double v = concentrated(ll, lt);
      if (v > best) {
        best = v;
        best_l = ll;
        best_t = lt;
      }
    }
  }
  if (!std::isfinite(best)) throw NumericalError("isotropic kriging: no admissible hyperparameters");

  const double dl = (log_l_hi - log_l_lo) / (kLengthSteps - 1);
  const double dt = (log_t_hi - log_t_lo) / (kNuggetSteps - 1);
  for (int sweep = 0; sweep < 2; ++sweep) {
    const double l = golden_maximize([&](double v) { return concentrated(v, best_t); },
                                     std::max(log_l_lo, best_l - dl), std::min(log_l_hi, best_l + dl), 1e-3);
    if (const double v = concentrated(l, best_t); v >= best) {
      best = v;
      best_l = l;
    }
    const double t = golden_maximize([&](double v) { return concentrated(best_l, v); },
                                     std::max(log_t_lo, best_t - dt), std::min(log_t_hi, best_t + dt), 1e-3);
    if (const double v = concentrated(best_l, t); v >= best) {
      best = v;
      best_t = t;
    }
  }

  const Vector lengths = Vector::Constant(dim, std::exp(best_l));
  const double ratio = std::exp(best_t);
  GaussianProcess unit(design, training, lengths, 1.0, ratio, basis);
  const double s2 = std::max(unit.residual_quadratic() / static_cast<double>(p), 1e-300);
  return IsotropicFit{GaussianProcess(design, training, lengths, s2, ratio * s2, basis), std::exp(best_l),
                      ratio};
}

}  // namespace actsub
