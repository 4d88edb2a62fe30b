#pragma once

#include "actsub/input_domain.hpp"
#include "actsub/linalg.hpp"

#include <optional>
#include <string>
#include <vector>

namespace actsub {

/// exp(-sum_i (y1_i - y2_i)^2 / (2 l_i^2)), unit amplitude.
double kernel(const Vector& y1, const Vector& y2, const Vector& lengths);

enum class MeanBasis { constant, linear, quadratic };

std::string to_string(MeanBasis basis);
MeanBasis mean_basis_from_string(const std::string& name);

/// Number of monomials of the basis in n variables; (n+2 choose 2) for quadratic.
Eigen::Index mean_basis_size(Eigen::Index n, MeanBasis basis);

/// Graded lexicographic monomials evaluated at each row: 1, y_1..y_n, then y_i y_j for i <= j.
Matrix mean_basis_matrix(const Matrix& points, MeanBasis basis);

struct KrigingHyperparameters {
  double alpha = 0.0;
  double sigma2 = 0.0;    // alpha * (lambda_1 + ... + lambda_m)
  Vector length_squares;  // l_i^2 = sigma2 / lambda_i
  Vector lengths;         // l_i
  double eta2 = 0.0;      // alpha * (lambda_{n+1} + ... + lambda_m)
};

/// Throws DegenerateInput if an active eigenvalue is zero.
KrigingHyperparameters hyperparameters_from_eigenvalues(const Vector& lambda, Eigen::Index n,
                                                        double alpha);

struct AlphaBracket {
  double lower = 0.0;
  double upper = 0.0;
  std::optional<std::string> warning;  // set when sigma_hat2 / sum(lambda) exceeded C1
};

/// [sigma_hat2 / sum(lambda), C1]. C1 defaults to the domain's Poincare constant.
AlphaBracket alpha_bracket(double sigma_hat2, const Vector& lambda, const InputDomain& domain,
                           std::optional<double> poincare_constant = std::nullopt);

/// Biased variance estimate (1/M) sum (f_j - mean f)^2.
double biased_variance(const Vector& values);

/// Universal kriging with covariance amplitude * K(lengths) + nugget * I and a polynomial mean,
/// the mean coefficients obtained by generalized least squares. Immutable once built.
class GaussianProcess {
 public:
  /// design rows are points. Throws InvalidInput for a non-poised design and
  /// NumericalError if the covariance stays indefinite after the jitter retries.
  GaussianProcess(Matrix design, Vector training, Vector lengths, double amplitude, double nugget,
                  MeanBasis basis);

  struct Prediction {
    double mean = 0.0;
    double variance = 0.0;
  };

  Prediction predict(const Vector& y) const;
  double predict_mean(const Vector& y) const;

  /// Gaussian log-likelihood of the training data with the mean coefficients profiled out.
  double log_likelihood() const { return log_likelihood_; }
  /// r^T Sigma^{-1} r for the GLS residual r, and log det Sigma.
  double residual_quadratic() const { return residual_quadratic_; }
  double log_determinant() const { return log_determinant_; }

  const Matrix& design() const { return design_; }
  const Vector& training() const { return training_; }
  const Vector& lengths() const { return lengths_; }
  double amplitude() const { return amplitude_; }
  double nugget() const { return nugget_; }
  double jitter() const { return jitter_; }
  MeanBasis basis() const { return basis_; }
  const Vector& mean_coefficients() const { return beta_; }
  const Vector& weights() const { return weights_; }

  /// Replace the mean coefficients and weights with stored values (deserialization).
  void restore_coefficients(const Vector& beta, const Vector& weights);

 private:
  Matrix design_;
  Vector training_;
  Vector lengths_;
  double amplitude_;
  double nugget_;
  double jitter_ = 0.0;
  MeanBasis basis_;
  Eigen::LLT<Matrix> cov_chol_;
  Matrix cinv_basis_;                 // Sigma^{-1} F
  Eigen::LLT<Matrix> gls_chol_;       // F^T Sigma^{-1} F
  Vector beta_;
  Vector weights_;
  double log_likelihood_ = 0.0;
  double residual_quadratic_ = 0.0;
  double log_determinant_ = 0.0;
};

/// Scale of the correlation kernel in the covariance: 1 as in K + eta^2 I, or the process
/// variance sigma^2, giving sigma^2 K + eta^2 I.
enum class KernelAmplitude { unit, process_variance };

std::string to_string(KernelAmplitude amplitude);
KernelAmplitude kernel_amplitude_from_string(const std::string& name);

/// Response surface on the reduced coordinates with the eigenvalue-informed hyperparameters.
class KrigingModel {
 public:
  KrigingModel(Matrix design, Vector training, Vector lambda, Eigen::Index n, double alpha,
               MeanBasis basis = MeanBasis::quadratic,
               KernelAmplitude amplitude = KernelAmplitude::process_variance);

  GaussianProcess::Prediction predict(const Vector& y) const { return process_.predict(y); }
  double predict_mean(const Vector& y) const { return process_.predict_mean(y); }

  const KrigingHyperparameters& hyperparameters() const { return hyper_; }
  const GaussianProcess& process() const { return process_; }
  GaussianProcess& mutable_process() { return process_; }
  const Vector& eigenvalues() const { return lambda_; }
  Eigen::Index active_dimension() const { return n_; }
  KernelAmplitude amplitude() const { return amplitude_; }
  const AlphaBracket& bracket() const { return bracket_; }
  void set_bracket(AlphaBracket bracket) { bracket_ = std::move(bracket); }

 private:
  Vector lambda_;
  Eigen::Index n_;
  KernelAmplitude amplitude_;
  KrigingHyperparameters hyper_;
  GaussianProcess process_;
  AlphaBracket bracket_;
};

/// Profile log-likelihood of the training data under the hyperparameters derived from alpha.
double log_marginal_likelihood(const Matrix& design, const Vector& training, const Vector& lambda,
                               Eigen::Index n, double alpha,
                               MeanBasis basis = MeanBasis::quadratic,
                               KernelAmplitude amplitude = KernelAmplitude::process_variance);

struct KrigingFitOptions {
  MeanBasis basis = MeanBasis::quadratic;
  KernelAmplitude amplitude = KernelAmplitude::process_variance;
  std::optional<double> poincare_constant;
  double relative_tolerance = 1e-4;
  int grid_points = 25;  // coarse log-spaced scan before golden-section refinement
};

/// Maximum likelihood over alpha in the bracket, then the universal kriging system.
KrigingModel fit_kriging(const Matrix& design, const Vector& training, const Vector& lambda,
                         Eigen::Index n, double sigma_hat2, const InputDomain& domain,
                         const KrigingFitOptions& options = {});

struct IsotropicFit {
  GaussianProcess process;
  double length = 0.0;
  double nugget_ratio = 0.0;  // nugget / amplitude
};

/// Isotropic squared-exponential process with profiled amplitude; length and nugget ratio by
/// bounded two-parameter maximum likelihood. Used by the comparison baselines.
IsotropicFit fit_isotropic(const Matrix& design, const Vector& training, MeanBasis basis);

}  // namespace actsub
