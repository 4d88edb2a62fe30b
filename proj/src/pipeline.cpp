#include "actsub/pipeline.hpp"

#include "actsub/elliptic.hpp"
#include "actsub/error.hpp"
#include "actsub/io.hpp"
#include "actsub/kernels.hpp"
#include "actsub/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <set>
#include <string_view>
#include <unordered_set>

namespace actsub {

namespace {

using nlohmann::json;

template <typename F>
auto staged(const char* stage, F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const ConfigError&) {
    throw;
  } catch (const NumericalError& e) {
    throw NumericalError(std::string(stage) + ": " + e.what());
  } catch (const DegenerateInput& e) {
    throw DegenerateInput(std::string(stage) + ": " + e.what());
  } catch (const Unsupported& e) {
    throw Unsupported(std::string(stage) + ": " + e.what());
  } catch (const InvalidInput& e) {
    throw InvalidInput(std::string(stage) + ": " + e.what());
  }
}

void check_keys(const json& obj, const char* where, std::initializer_list<std::string_view> known) {
  if (!obj.is_object()) throw ConfigError(std::string(where) + " must be an object");
  for (const auto& [key, _] : obj.items())
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw ConfigError(std::string("unknown key '") + key + "' in " + where);
}

template <typename T>
void read_field(const json& obj, const char* key, T& target) {
  if (!obj.contains(key)) return;
  try {
    target = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("field '") + key + "': " + e.what());
  }
}

Vector padded(const std::vector<double>& values, Eigen::Index m) {
  Vector v = Vector::Zero(std::max<Eigen::Index>(m, static_cast<Eigen::Index>(values.size())));
  for (std::size_t i = 0; i < values.size(); ++i) v(static_cast<Eigen::Index>(i)) = values[i];
  return v;
}

std::size_t hash_point(const Vector& x) {
  std::size_t h = 1469598103934665603ULL;
  const auto* bytes = reinterpret_cast<const unsigned char*>(x.data());
  for (std::size_t i = 0; i < static_cast<std::size_t>(x.size()) * sizeof(double); ++i) {
    h ^= bytes[i];
    h *= 1099511628211ULL;
  }
  return h;
}

long count_overlap(const Matrix& training_points, const Matrix& test_points) {
  std::unordered_multiset<std::size_t> hashes;
  for (Eigen::Index k = 0; k < training_points.cols(); ++k) hashes.insert(hash_point(training_points.col(k)));
  long overlap = 0;
  for (Eigen::Index j = 0; j < test_points.cols(); ++j) {
    const Vector x = test_points.col(j);
    if (!hashes.count(hash_point(x))) continue;
    for (Eigen::Index k = 0; k < training_points.cols(); ++k)
      if (training_points.col(k) == x) {
        ++overlap;
        break;
      }
  }
  return overlap;
}

Budget budget_from(const CountingModel& counter, long prior_gradient_evals) {
  Budget b;
  b.function_evals = counter.value_calls();
  b.gradient_evals = counter.gradient_calls() + prior_gradient_evals;
  b.effective_cost = 3 * b.gradient_evals + b.function_evals;
  return b;
}

Matrix design_for(const PipelineConfig& cfg, const ReducedDomain& domain) {
  return domain.is_zonotope() ? zonotope_design(domain, cfg.spacing)
                              : tensor_design(domain, cfg.points_per_dim);
}

Matrix lift_design(const ReducedDomain& domain, const Matrix& design) {
  Matrix lifted(domain.subspace().dimension(), design.rows());
  for (Eigen::Index k = 0; k < design.rows(); ++k) lifted.col(k) = lift_point(domain, design.row(k).transpose());
  return lifted;
}

PipelineResult finish(const PipelineConfig& cfg, const std::shared_ptr<CountingModel>& counter,
                      GradientSampleSet samples, const ActiveSubspace& subspace,
                      long prior_gradient_evals) {
  const InputDomain input = counter->input_domain();
  const ReducedDomain domain = staged("reduced domain", [&] { return ReducedDomain(input, subspace); });
  const auto n = subspace.active_dimension();

  Matrix design = staged("design", [&] { return design_for(cfg, domain); });
  Matrix lifted = staged("design", [&] { return lift_design(domain, design); });

  Vector training = staged("training", [&] {
    if (cfg.training_sample == "lift") return kernels::evaluate_values_parallel(*counter, lifted);
    Vector out(design.rows());
    for (Eigen::Index k = 0; k < design.rows(); ++k)
      out(k) = evaluate_Ghat(*counter, domain, design.row(k).transpose(),
                             McSurrogateConfig{cfg.mc_samples, derive_seed(cfg.mc_seed, k)});
    return out;
  });

  const double sigma_hat2 = biased_variance(samples.values);
  KrigingFitOptions options;
  options.poincare_constant = cfg.poincare_constant;
  options.amplitude = kernel_amplitude_from_string(cfg.kernel_amplitude);
  KrigingModel model = staged("fit", [&] {
    return fit_kriging(design, training, subspace.eigenvalues(), n, sigma_hat2, input, options);
  });

  const Matrix w1 = subspace.active_basis();
  Vector prediction(samples.count());
  for (Eigen::Index j = 0; j < samples.count(); ++j)
    prediction(j) = model.predict_mean(w1.transpose() * samples.points.col(j));
  ErrorReport report = make_error_report(samples.values, prediction);
  report.budget = budget_from(*counter, prior_gradient_evals);

  std::vector<std::string> notices;
  if (model.bracket().warning) notices.push_back(*model.bracket().warning);
  const long overlap = count_overlap(lifted, samples.points);
  return PipelineResult{std::move(samples), sigma_hat2, subspace,         std::move(design),
                        std::move(lifted),  std::move(training), std::move(model), std::move(report),
                        std::move(notices), overlap};
}

Vector predict_baseline(const GaussianProcess& gp, const Matrix& points_rows) {
  Vector out(points_rows.rows());
  for (Eigen::Index j = 0; j < points_rows.rows(); ++j) out(j) = gp.predict_mean(points_rows.row(j).transpose());
  return out;
}

Histogram log_histogram(const Vector& errors) {
  constexpr int kBins = 20;
  constexpr double kFloor = 1e-17;
  const Vector logs = errors.cwiseMax(kFloor).array().log10().matrix();
  double lo = std::floor(logs.minCoeff());
  double hi = std::ceil(logs.maxCoeff());
  if (hi <= lo) hi = lo + 1.0;
  Histogram h;
  h.edges = Vector::LinSpaced(kBins + 1, lo, hi);
  h.counts.assign(kBins, 0);
  const double width = (hi - lo) / kBins;
  for (Eigen::Index i = 0; i < logs.size(); ++i) {
    int bin = static_cast<int>((logs(i) - lo) / width);
    h.counts[static_cast<std::size_t>(std::clamp(bin, 0, kBins - 1))]++;
  }
  return h;
}

}  // namespace

void PipelineConfig::validate() const {
  if (samples < 1) throw ConfigError("samples (M) must be at least 1");
  if (active_dimension < 1) throw ConfigError("active_dimension (n) must be at least 1");
  if (points_per_dim < 2) throw ConfigError("points_per_dim must be at least 2");
  if (!(spacing > 0.0)) throw ConfigError("spacing must be positive");
  if (training_sample != "lift" && training_sample != "conditional")
    throw ConfigError("training_sample must be 'lift' or 'conditional'");
  if (mc_samples < 1) throw ConfigError("mc_samples (N) must be at least 1");
  if (kernel_amplitude != "unit" && kernel_amplitude != "process_variance")
    throw ConfigError("kernel_amplitude must be 'unit' or 'process_variance'");
  if (poincare_constant && !(*poincare_constant > 0.0)) throw ConfigError("poincare_constant must be positive");
  if (!(response_error >= 0.0)) throw ConfigError("response_error must be non-negative");
  if (full_space_test_points < 1) throw ConfigError("full_space_test_points must be positive");
  for (double e : epsilons)
    if (!(e >= 0.0 && e <= 0.5)) throw ConfigError("epsilons must lie in [0, 0.5]");
  const auto& m = model;
  if (m.name != "elliptic" && m.name != "ridge" && m.name != "quadratic")
    throw ConfigError("model.name must be elliptic, ridge or quadratic");
  if (m.input != "gaussian" && m.input != "uniform") throw ConfigError("model.input must be gaussian or uniform");
  if (m.name == "elliptic") {
    if (m.input != "gaussian") throw ConfigError("the elliptic model takes Gaussian inputs");
    if (m.grid < 17) throw ConfigError("model.grid must be at least 17");
    if (!(m.correlation_length > 0.0)) throw ConfigError("model.correlation_length must be positive");
    if (m.terms < 2) throw ConfigError("model.terms must be at least 2");
  }
  if (m.profile != "exp" && m.profile != "identity") throw ConfigError("model.profile must be exp or identity");
  if (m.dimension < 0) throw ConfigError("model.dimension must be non-negative");
}

PipelineConfig config_from_json(const json& doc) {
  PipelineConfig cfg;
  check_keys(doc, "config",
             {"model", "samples", "active_dimension", "design", "training_sample", "mc_samples", "kernel_amplitude",
              "poincare_constant", "response_error", "seeds", "comparison", "perturbation", "output_dir"});
  if (doc.contains("model")) {
    const auto& m = doc.at("model");
    check_keys(m, "model",
               {"name", "input", "dimension", "grid", "correlation_length", "terms", "cache_dir", "direction",
                "profile", "diagonal", "matrix"});
    auto& s = cfg.model;
    read_field(m, "name", s.name);
    read_field(m, "input", s.input);
    read_field(m, "dimension", s.dimension);
    read_field(m, "grid", s.grid);
    read_field(m, "correlation_length", s.correlation_length);
    read_field(m, "terms", s.terms);
    read_field(m, "cache_dir", s.cache_dir);
    read_field(m, "direction", s.direction);
    read_field(m, "profile", s.profile);
    read_field(m, "diagonal", s.diagonal);
    read_field(m, "matrix", s.matrix);
  }
  read_field(doc, "samples", cfg.samples);
  read_field(doc, "active_dimension", cfg.active_dimension);
  if (doc.contains("design")) {
    const auto& d = doc.at("design");
    check_keys(d, "design", {"points_per_dim", "spacing"});
    read_field(d, "points_per_dim", cfg.points_per_dim);
    read_field(d, "spacing", cfg.spacing);
  }
  read_field(doc, "training_sample", cfg.training_sample);
  read_field(doc, "mc_samples", cfg.mc_samples);
  read_field(doc, "kernel_amplitude", cfg.kernel_amplitude);
  if (doc.contains("poincare_constant") && !doc.at("poincare_constant").is_null()) {
    double c = 0.0;
    read_field(doc, "poincare_constant", c);
    cfg.poincare_constant = c;
  }
  read_field(doc, "response_error", cfg.response_error);
  if (doc.contains("seeds")) {
    const auto& s = doc.at("seeds");
    check_keys(s, "seeds", {"sampling", "mc", "perturbation", "testing"});
    read_field(s, "sampling", cfg.sampling_seed);
    read_field(s, "mc", cfg.mc_seed);
    read_field(s, "perturbation", cfg.perturbation_seed);
    read_field(s, "testing", cfg.testing_seed);
  }
  if (doc.contains("comparison")) {
    const auto& c = doc.at("comparison");
    check_keys(c, "comparison", {"local_sensitivity", "full_space", "full_space_test_points"});
    read_field(c, "local_sensitivity", cfg.local_sensitivity);
    read_field(c, "full_space", cfg.full_space);
    read_field(c, "full_space_test_points", cfg.full_space_test_points);
  }
  if (doc.contains("perturbation")) {
    const auto& p = doc.at("perturbation");
    check_keys(p, "perturbation", {"epsilons"});
    read_field(p, "epsilons", cfg.epsilons);
  }
  if (doc.contains("output_dir")) {
    std::string dir;
    read_field(doc, "output_dir", dir);
    cfg.output_dir = dir;
  }
  cfg.validate();
  return cfg;
}

json config_to_json(const PipelineConfig& cfg) {
  const auto& m = cfg.model;
  return {
      {"model",
       {{"name", m.name},
        {"input", m.input},
        {"dimension", m.dimension},
        {"grid", m.grid},
        {"correlation_length", m.correlation_length},
        {"terms", m.terms},
        {"cache_dir", m.cache_dir},
        {"direction", m.direction},
        {"profile", m.profile},
        {"diagonal", m.diagonal},
        {"matrix", m.matrix}}},
      {"samples", cfg.samples},
      {"active_dimension", cfg.active_dimension},
      {"design", {{"points_per_dim", cfg.points_per_dim}, {"spacing", cfg.spacing}}},
      {"training_sample", cfg.training_sample},
      {"mc_samples", cfg.mc_samples},
      {"kernel_amplitude", cfg.kernel_amplitude},
      {"poincare_constant", cfg.poincare_constant ? json(*cfg.poincare_constant) : json(nullptr)},
      {"response_error", cfg.response_error},
      {"seeds",
       {{"sampling", cfg.sampling_seed},
        {"mc", cfg.mc_seed},
        {"perturbation", cfg.perturbation_seed},
        {"testing", cfg.testing_seed}}},
      {"comparison",
       {{"local_sensitivity", cfg.local_sensitivity},
        {"full_space", cfg.full_space},
        {"full_space_test_points", cfg.full_space_test_points}}},
      {"perturbation", {{"epsilons", cfg.epsilons}}},
      {"output_dir", cfg.output_dir.string()},
  };
}

ModelPtr make_model(const ModelSpec& spec) {
  if (spec.name == "elliptic")
    return make_elliptic(spec.grid, spec.correlation_length, spec.terms, spec.cache_dir);
  const InputKind kind = input_kind_from_string(spec.input);
  if (spec.name == "ridge")
    return make_ridge(padded(spec.direction, spec.dimension),
                      spec.profile == "exp" ? RidgeProfile::exp : RidgeProfile::identity, kind);
  if (spec.name == "quadratic") {
    if (!spec.matrix.empty()) {
      const auto m = static_cast<Eigen::Index>(spec.matrix.size());
      Matrix a(m, m);
      for (Eigen::Index r = 0; r < m; ++r) {
        if (static_cast<Eigen::Index>(spec.matrix[static_cast<std::size_t>(r)].size()) != m)
          throw ConfigError("model.matrix must be square");
        for (Eigen::Index c = 0; c < m; ++c) a(r, c) = spec.matrix[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
      }
      return make_quadratic_form(a, kind);
    }
    return make_quadratic_form(padded(spec.diagonal, spec.dimension).asDiagonal(), kind);
  }
  throw ConfigError("unknown model '" + spec.name + "'");
}

double quantile(Vector data, double p) {
  if (data.size() == 0) throw InvalidInput("quantile of empty data");
  std::sort(data.data(), data.data() + data.size());
  const double pos = std::clamp(p, 0.0, 1.0) * static_cast<double>(data.size() - 1);
  const auto lo = static_cast<Eigen::Index>(std::floor(pos));
  const auto hi = std::min<Eigen::Index>(lo + 1, data.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return data(lo) + frac * (data(hi) - data(lo));
}

ErrorReport make_error_report(const Vector& truth, const Vector& prediction) {
  if (truth.size() != prediction.size() || truth.size() == 0)
    throw InvalidInput("error report: truth and prediction sizes differ");
  ErrorReport r;
  r.truth = truth;
  r.prediction = prediction;
  r.errors.resize(truth.size());
  r.absolute.assign(static_cast<std::size_t>(truth.size()), false);
  for (Eigen::Index j = 0; j < truth.size(); ++j) {
    const double diff = std::abs(truth(j) - prediction(j));
    if (std::abs(truth(j)) < 1e-12) {
      r.errors(j) = diff;
      r.absolute[static_cast<std::size_t>(j)] = true;
    } else {
      r.errors(j) = diff / std::abs(truth(j));
    }
  }
  r.mean = r.errors.mean();
  r.median = quantile(r.errors, 0.5);
  r.q10 = quantile(r.errors, 0.1);
  r.q25 = quantile(r.errors, 0.25);
  r.q75 = quantile(r.errors, 0.75);
  r.q90 = quantile(r.errors, 0.9);
  r.max = r.errors.maxCoeff();
  r.mse = (truth - prediction).squaredNorm() / static_cast<double>(truth.size());
  r.histogram = log_histogram(r.errors);
  return r;
}

Matrix draw_inputs(const InputDomain& domain, long count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Matrix x(domain.m, count);
  if (domain.kind == InputKind::gaussian_standard) {
    std::normal_distribution<double> normal(0.0, 1.0);
    for (long j = 0; j < count; ++j)
      for (Eigen::Index i = 0; i < domain.m; ++i) x(i, j) = normal(rng);
  } else {
    std::uniform_real_distribution<double> uniform(-1.0, 1.0);
    for (long j = 0; j < count; ++j)
      for (Eigen::Index i = 0; i < domain.m; ++i) x(i, j) = uniform(rng);
  }
  return x;
}

PipelineResult run_pipeline(const PipelineConfig& cfg, const ModelPtr& model) {
  cfg.validate();
  auto counter = std::make_shared<CountingModel>(model);
  const InputDomain input = counter->input_domain();
  if (cfg.active_dimension >= input.m)
    throw ConfigError("active_dimension must be smaller than the input dimension " + std::to_string(input.m));
  GradientSampleSet samples = staged("sampling", [&] {
    return kernels::sample_gradients_parallel(*counter, draw_inputs(input, cfg.samples, cfg.sampling_seed));
  });
  samples.validate();
  const ActiveSubspace subspace =
      staged("gradient analysis", [&] { return estimate_subspace(samples, cfg.active_dimension); });
  return finish(cfg, counter, std::move(samples), subspace, 0);
}

PipelineResult run_pipeline(const PipelineConfig& cfg) { return run_pipeline(cfg, make_model(cfg.model)); }

PipelineResult run_from_samples(const PipelineConfig& cfg, const ModelPtr& model, GradientSampleSet samples,
                                const ActiveSubspace& subspace) {
  cfg.validate();
  samples.validate();
  const long prior = samples.count();
  return finish(cfg, std::make_shared<CountingModel>(model), std::move(samples), subspace, prior);
}

BaselineResult run_local_sensitivity_baseline(const PipelineConfig& cfg, const ModelPtr& model,
                                              const Matrix& test_points, const Vector& test_values) {
  auto counter = std::make_shared<CountingModel>(model);
  const InputDomain input = counter->input_domain();
  const auto m = input.m;
  const auto n = cfg.active_dimension;
  const SensitivityRanking ranking =
      staged("local sensitivity", [&] { return local_sensitivity_ranking(*counter, Vector::Zero(m)); });

  // Coordinate basis in ranking order; squared partials stand in for the eigenvalues.
  Matrix basis = Matrix::Zero(m, m);
  Vector pseudo(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    basis(ranking.order[static_cast<std::size_t>(i)], i) = 1.0;
    pseudo(i) = ranking.gradient(ranking.order[static_cast<std::size_t>(i)]) *
                ranking.gradient(ranking.order[static_cast<std::size_t>(i)]);
  }
  const ReducedDomain domain(input, ActiveSubspace(basis, pseudo, n));
  const Matrix design = staged("design", [&] { return design_for(cfg, domain); });
  const Matrix lifted = staged("design", [&] { return lift_design(domain, design); });
  const Vector training = staged("training", [&] { return kernels::evaluate_values_parallel(*counter, lifted); });
  IsotropicFit fit = staged("fit", [&] { return fit_isotropic(design, training, MeanBasis::quadratic); });

  const Matrix reduced = test_points.transpose() * basis.leftCols(n);
  ErrorReport report = make_error_report(test_values, predict_baseline(fit.process, reduced));
  report.budget = budget_from(*counter, 0);

  std::vector<Eigen::Index> coords(ranking.order.begin(), ranking.order.begin() + n);
  std::vector<std::string> notices;
  if (ranking.zero_gradient) notices.push_back("gradient at the origin is zero; coordinates taken in index order");
  return BaselineResult{std::move(coords), ranking.zero_gradient, std::move(fit.process), std::move(report),
                        std::move(notices)};
}

BaselineResult run_full_space_baseline(const PipelineConfig& cfg, const ModelPtr& model, long training_budget,
                                       const Matrix& test_points, const Vector& test_values) {
  if (training_budget < 2) throw ConfigError("full-space baseline needs a training budget of at least 2");
  auto counter = std::make_shared<CountingModel>(model);
  const InputDomain input = counter->input_domain();
  const auto m = input.m;
  const Matrix points = draw_inputs(input, training_budget, derive_seed(cfg.testing_seed, 1));
  const Vector values = staged("training", [&] { return kernels::evaluate_values_parallel(*counter, points); });

  std::vector<std::string> notices;
  MeanBasis basis = MeanBasis::quadratic;
  if (training_budget < mean_basis_size(m, MeanBasis::quadratic)) {
    basis = training_budget > mean_basis_size(m, MeanBasis::linear) ? MeanBasis::linear : MeanBasis::constant;
    notices.push_back("budget " + std::to_string(training_budget) + " is below the " +
                      std::to_string(mean_basis_size(m, MeanBasis::quadratic)) +
                      " quadratic mean coefficients; using a " + to_string(basis) + " mean");
  }
  IsotropicFit fit = staged("fit", [&] { return fit_isotropic(points.transpose(), values, basis); });
  ErrorReport report = make_error_report(test_values, predict_baseline(fit.process, test_points.transpose()));
  report.budget = budget_from(*counter, 0);
  return BaselineResult{{}, false, std::move(fit.process), std::move(report), std::move(notices)};
}

ComparisonResult run_comparison(const PipelineConfig& cfg, const ModelPtr& model) {
  PipelineResult arm = run_pipeline(cfg, model);
  ComparisonResult out{std::move(arm), std::nullopt, std::nullopt, {}, {}, std::nullopt};
  if (cfg.local_sensitivity)
    out.local_sensitivity = run_local_sensitivity_baseline(cfg, model, out.subspace_arm.samples.points,
                                                           out.subspace_arm.samples.values);
  if (cfg.full_space) {
    const InputDomain input = model->input_domain();
    out.fresh_points = draw_inputs(input, cfg.full_space_test_points, cfg.testing_seed);
    out.fresh_values = staged("testing", [&] { return kernels::evaluate_values_parallel(*model, out.fresh_points); });
    const Matrix w1 = out.subspace_arm.subspace.active_basis();
    Vector pred(out.fresh_points.cols());
    for (Eigen::Index j = 0; j < pred.size(); ++j)
      pred(j) = out.subspace_arm.model.predict_mean(w1.transpose() * out.fresh_points.col(j));
    out.subspace_on_fresh = make_error_report(out.fresh_values, pred);
    out.subspace_on_fresh->budget = out.subspace_arm.report.budget;
    out.full_space = run_full_space_baseline(cfg, model, out.subspace_arm.report.budget.effective_cost,
                                             out.fresh_points, out.fresh_values);
  }
  return out;
}

std::vector<PerturbationRow> run_perturbation_study(const PipelineConfig& cfg, const ModelPtr& model) {
  cfg.validate();
  auto counter = std::make_shared<CountingModel>(model);
  const InputDomain input = counter->input_domain();
  GradientSampleSet samples = staged("sampling", [&] {
    return kernels::sample_gradients_parallel(*counter, draw_inputs(input, cfg.samples, cfg.sampling_seed));
  });
  const ActiveSubspace subspace =
      staged("gradient analysis", [&] { return estimate_subspace(samples, cfg.active_dimension); });

  BoundInputs b;
  b.eigenvalues = subspace.eigenvalues();
  b.n = cfg.active_dimension;
  b.poincare_constant = cfg.poincare_constant.value_or(default_poincare_constant(input));
  b.mc_samples = cfg.training_sample == "lift" ? 1 : cfg.mc_samples;
  b.response_error = cfg.response_error;

  std::vector<PerturbationRow> rows;
  for (std::size_t i = 0; i < cfg.epsilons.size(); ++i) {
    const double eps = cfg.epsilons[i];
    const ActiveSubspace perturbed = perturb_subspace(subspace, eps, derive_seed(cfg.perturbation_seed, i));
    const PipelineResult r = run_from_samples(cfg, model, samples, perturbed);
    PerturbationRow row;
    row.epsilon = eps;
    row.distance = subspace_distance(subspace.active_basis(), perturbed.active_basis());
    row.empirical_mse = r.report.mse;
    b.epsilon = eps;
    row.bound = bound_perturbed(b, BoundKind::response_surface);
    row.mean_relative_error = r.report.mean;
    rows.push_back(row);
  }
  return rows;
}

json report_to_json(const ErrorReport& r) {
  const long flagged = std::count(r.absolute.begin(), r.absolute.end(), true);
  return {{"count", r.errors.size()},
          {"mean_relative_error", r.mean},
          {"median", r.median},
          {"quantiles", {{"0.10", r.q10}, {"0.25", r.q25}, {"0.75", r.q75}, {"0.90", r.q90}}},
          {"max", r.max},
          {"mse", r.mse},
          {"absolute_error_points", flagged},
          {"budget",
           {{"function_evals", r.budget.function_evals},
            {"gradient_evals", r.budget.gradient_evals},
            {"effective_cost", r.budget.effective_cost}}}};
}

void write_error_outputs(const std::filesystem::path& dir, const ErrorReport& r) {
  Matrix rows(r.errors.size(), 5);
  for (Eigen::Index j = 0; j < r.errors.size(); ++j)
    rows.row(j) << static_cast<double>(j), r.truth(j), r.prediction(j), r.errors(j),
        r.absolute[static_cast<std::size_t>(j)] ? 1.0 : 0.0;
  write_csv(dir / "errors.csv", {"index", "f", "prediction", "error", "absolute"}, rows);

  const auto bins = static_cast<Eigen::Index>(r.histogram.counts.size());
  Matrix hist(bins, 3);
  for (Eigen::Index b = 0; b < bins; ++b)
    hist.row(b) << r.histogram.edges(b), r.histogram.edges(b + 1),
        static_cast<double>(r.histogram.counts[static_cast<std::size_t>(b)]);
  write_csv(dir / "histogram.csv", {"log10_error_lower", "log10_error_upper", "count"}, hist);
}

void write_pipeline_outputs(const std::filesystem::path& dir, const PipelineResult& result) {
  std::filesystem::create_directories(dir);
  write_samples_csv(dir / "samples.csv", result.samples);
  write_json(dir / "subspace.json", subspace_to_json(result.subspace));
  write_design_csv(dir / "design.csv", result.design);
  write_training_csv(dir / "training.csv", result.design, result.training);
  write_json(dir / "model.json", model_to_json(result.model));
  write_error_outputs(dir, result.report);
  json report = report_to_json(result.report);
  report["sigma_hat2"] = result.sigma_hat2;
  report["eigenvalues"] = to_std(result.subspace.eigenvalues());
  report["alpha"] = result.model.hyperparameters().alpha;
  report["eta2"] = result.model.hyperparameters().eta2;
  report["design_points"] = result.design.rows();
  report["testing_overlap"] = result.hygiene_overlap;
  report["notices"] = result.notices;
  report["variance_formula"] = "universal kriging";
  write_json(dir / "report.json", report);
}

}  // namespace actsub
