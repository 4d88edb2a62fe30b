#pragma once

#include "actsub/bounds.hpp"
#include "actsub/domain.hpp"
#include "actsub/kriging.hpp"
#include "actsub/model.hpp"
#include "actsub/subspace.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace actsub {

struct ModelSpec {
  std::string name = "elliptic";  // elliptic | ridge | quadratic
  std::string input = "gaussian";  // gaussian | uniform (analytic models only)
  Eigen::Index dimension = 0;      // analytic models: zero-pad the vectors below up to m
  // elliptic
  int grid = 33;
  double correlation_length = 1.0;
  Eigen::Index terms = 100;
  std::string cache_dir;
  // ridge
  std::vector<double> direction = {0.7, 0.3};
  std::string profile = "exp";
  // quadratic: diagonal of A, or the full symmetric matrix when given
  std::vector<double> diagonal = {3.0, 1.0, 0.1};
  std::vector<std::vector<double>> matrix;
};

struct PipelineConfig {
  ModelSpec model;
  long samples = 300;                 // M
  Eigen::Index active_dimension = 1;  // n
  int points_per_dim = 5;             // tensor design on Gaussian reduced domains
  double spacing = 0.5;               // zonotope design grid
  std::string training_sample = "lift";  // lift | conditional
  long mc_samples = 1;                // N, used by conditional training
  std::string kernel_amplitude = "process_variance";  // process_variance | unit
  std::optional<double> poincare_constant;
  double response_error = 0.0;        // C2 delta for the bound columns
  std::uint64_t sampling_seed = 1;
  std::uint64_t mc_seed = 2;
  std::uint64_t perturbation_seed = 3;
  std::uint64_t testing_seed = 4;
  bool local_sensitivity = true;
  bool full_space = true;
  long full_space_test_points = 500;
  std::vector<double> epsilons = {0.0, 0.05, 0.1, 0.2};
  std::filesystem::path output_dir = "run";

  /// Throws ConfigError on violated invariants.
  void validate() const;
};

/// Reads a config document; absent fields keep their defaults. Throws ConfigError.
PipelineConfig config_from_json(const nlohmann::json& doc);
nlohmann::json config_to_json(const PipelineConfig& cfg);

/// Builds the zoo model named by the spec.
ModelPtr make_model(const ModelSpec& spec);

struct Budget {
  long function_evals = 0;
  long gradient_evals = 0;
  long effective_cost = 0;  // 3 * gradient_evals + function_evals
};

struct Histogram {
  Vector edges;  // log10 relative error
  std::vector<long> counts;
};

struct ErrorReport {
  Vector truth;
  Vector prediction;
  Vector errors;                // relative, or absolute where |f| < 1e-12
  std::vector<bool> absolute;   // denominator guard triggered
  double mean = 0.0;
  double median = 0.0;
  double q10 = 0.0, q25 = 0.0, q75 = 0.0, q90 = 0.0;
  double max = 0.0;
  double mse = 0.0;             // mean of (f - prediction)^2
  Histogram histogram;
  Budget budget;
};

/// Relative errors with the small-denominator guard, summary statistics and histogram.
ErrorReport make_error_report(const Vector& truth, const Vector& prediction);

/// Linear-interpolation quantile of unsorted data, p in [0, 1].
double quantile(Vector data, double p);

/// M points drawn from the input density (columns).
Matrix draw_inputs(const InputDomain& domain, long count, std::uint64_t seed);

struct PipelineResult {
  GradientSampleSet samples;
  double sigma_hat2 = 0.0;
  ActiveSubspace subspace;
  Matrix design;       // rows y_k
  Matrix lifted;       // columns x_k
  Vector training;
  KrigingModel model;
  ErrorReport report;
  std::vector<std::string> notices;
  long hygiene_overlap = 0;  // testing inputs that coincide with training inputs
};

/// Steps 1-6 against the given model: sampling, subspace, reduced domain, design and lift,
/// training and fit, testing on the initial samples.
PipelineResult run_pipeline(const PipelineConfig& cfg, const ModelPtr& model);
PipelineResult run_pipeline(const PipelineConfig& cfg);

/// Steps 3-6 with a given subspace and already drawn samples.
PipelineResult run_from_samples(const PipelineConfig& cfg, const ModelPtr& model,
                                GradientSampleSet samples, const ActiveSubspace& subspace);

struct BaselineResult {
  std::vector<Eigen::Index> coordinates;  // local-sensitivity arm, 0-based
  bool zero_gradient = false;
  GaussianProcess process;
  ErrorReport report;
  std::vector<std::string> notices;
};

/// Top-n coordinates from one gradient at the origin, kriging on that coordinate subspace with
/// the same design, tested on the given points.
BaselineResult run_local_sensitivity_baseline(const PipelineConfig& cfg, const ModelPtr& model,
                                              const Matrix& test_points, const Vector& test_values);

/// Isotropic kriging on all m inputs trained on 3M+P draws from the input density.
BaselineResult run_full_space_baseline(const PipelineConfig& cfg, const ModelPtr& model,
                                       long training_budget, const Matrix& test_points,
                                       const Vector& test_values);

struct ComparisonResult {
  PipelineResult subspace_arm;
  std::optional<BaselineResult> local_sensitivity;
  std::optional<BaselineResult> full_space;
  Matrix fresh_points;                       // shared testing set of the full-space comparison
  Vector fresh_values;
  std::optional<ErrorReport> subspace_on_fresh;
};

ComparisonResult run_comparison(const PipelineConfig& cfg, const ModelPtr& model);

struct PerturbationRow {
  double epsilon = 0.0;
  double distance = 0.0;  // measured ||W - W~||
  double empirical_mse = 0.0;
  double bound = 0.0;
  double mean_relative_error = 0.0;
};

/// For each epsilon: perturb the estimated basis, rerun steps 3-6 with it and compare the
/// empirical mean squared error against the perturbed response-surface bound.
std::vector<PerturbationRow> run_perturbation_study(const PipelineConfig& cfg, const ModelPtr& model);

/// Run-directory writers.
nlohmann::json report_to_json(const ErrorReport& report);
void write_error_outputs(const std::filesystem::path& dir, const ErrorReport& report);
void write_pipeline_outputs(const std::filesystem::path& dir, const PipelineResult& result);

}  // namespace actsub
