#include "actsub/error.hpp"
#include "actsub/io.hpp"
#include "actsub/kernels.hpp"
#include "actsub/pipeline.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

namespace {

using namespace actsub;
using nlohmann::json;

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

PipelineConfig load_config(const std::string& path, const std::string& out) {
  PipelineConfig cfg;
  if (!path.empty()) {
    json doc;
    try {
      doc = read_json(path);
    } catch (const InvalidInput& e) {
      throw ConfigError(e.what());
    }
    cfg = config_from_json(doc);
  }
  if (!out.empty()) cfg.output_dir = out;
  cfg.validate();
  return cfg;
}

void print_eigenvalues(const ActiveSubspace& s) {
  const Vector& lam = s.eigenvalues();
  const double top = lam(0) > 0.0 ? lam(0) : 1.0;
  std::printf("%5s  %-24s  %-12s\n", "i", "eigenvalue", "normalized");
  for (Eigen::Index i = 0; i < lam.size() && i < 10; ++i)
    std::printf("%5ld  %-24.17g  %-12.4e\n", static_cast<long>(i + 1), lam(i), lam(i) / top);
  if (lam.size() > 10) std::printf("  ... %ld more\n", static_cast<long>(lam.size() - 10));
}

void print_report(const char* label, const ErrorReport& r) {
  std::printf("%-18s mean %.4e  median %.4e  max %.4e  budget 3M+P = %ld (f %ld, grad %ld)\n", label, r.mean,
              r.median, r.max, r.budget.effective_cost, r.budget.function_evals, r.budget.gradient_evals);
}

InputDomain domain_from(const std::string& input, Eigen::Index m) {
  try {
    return {input_kind_from_string(input), m};
  } catch (const InvalidInput& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Active subspace detection and kriging response surfaces"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  const auto add_config = [&](CLI::App* sub) {
    sub->add_option("-c,--config", config_path, "JSON configuration file (defaults apply when omitted)");
    sub->add_option("-o,--out", out_dir, "Run directory (overrides output_dir)");
  };

  auto* sample = app.add_subcommand("sample", "Draw M inputs and record f and grad f (samples.csv)");
  add_config(sample);

  std::string samples_path, subspace_path, design_path, training_path, model_path, points_path, input_kind = "gaussian";
  Eigen::Index n = 1;
  auto* subspace = app.add_subcommand("subspace", "Estimate the active subspace from samples.csv (subspace.json)");
  subspace->add_option("-s,--samples", samples_path, "Gradient samples CSV")->required();
  subspace->add_option("-n,--active-dimension", n, "Partition index n")->required();
  subspace->add_option("-o,--out", out_dir, "Output directory")->required();

  int points_per_dim = 5;
  double spacing = 0.5;
  auto* design = app.add_subcommand("design", "Design on the reduced domain (design.csv)");
  design->add_option("--subspace", subspace_path, "subspace.json")->required();
  design->add_option("--input", input_kind, "gaussian or uniform")->capture_default_str();
  design->add_option("--points-per-dim", points_per_dim, "Tensor design size (Gaussian)")->capture_default_str();
  design->add_option("--spacing", spacing, "Grid spacing (zonotope)")->capture_default_str();
  design->add_option("-o,--out", out_dir, "Output directory")->required();

  auto* fit = app.add_subcommand("fit", "Train the kriging surface (training.csv, model.json)");
  add_config(fit);
  fit->add_option("--subspace", subspace_path, "subspace.json")->required();
  fit->add_option("--samples", samples_path, "samples.csv, for the variance estimate")->required();
  fit->add_option("--design", design_path, "design.csv; training values are computed by lifting");
  fit->add_option("--training", training_path, "training.csv; skips model evaluation");

  auto* predict = app.add_subcommand("predict", "Evaluate a fitted surface at points (predictions.csv)");
  predict->add_option("--model", model_path, "model.json")->required();
  predict->add_option("--points", points_path, "CSV of reduced (n columns) or full (m columns) points")->required();
  predict->add_option("--subspace", subspace_path, "subspace.json, required for full-space points");
  predict->add_option("-o,--out", out_dir, "Output directory")->required();

  auto* pipeline = app.add_subcommand("pipeline", "Run the six-step algorithm end to end");
  add_config(pipeline);
  auto* compare = app.add_subcommand("compare", "Subspace surface against coordinate and full-space baselines");
  add_config(compare);
  auto* perturb = app.add_subcommand("perturb-study", "Error versus subspace perturbation (perturbation.csv)");
  add_config(perturb);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (sample->parsed()) {
      const auto cfg = load_config(config_path, out_dir);
      auto model = make_model(cfg.model);
      const auto points = draw_inputs(model->input_domain(), cfg.samples, cfg.sampling_seed);
      const auto set = kernels::sample_gradients_parallel(*model, points);
      write_samples_csv(cfg.output_dir / "samples.csv", set);
      std::printf("wrote %ld samples to %s\n", static_cast<long>(set.count()),
                  (cfg.output_dir / "samples.csv").c_str());
    } else if (subspace->parsed()) {
      const auto set = read_samples_csv(samples_path);
      if (n < 1 || n >= set.dimension()) throw ConfigError("active dimension must lie in [1, m-1]");
      const auto s = estimate_subspace(set, n);
      write_json(std::filesystem::path(out_dir) / "subspace.json", subspace_to_json(s));
      print_eigenvalues(s);
    } else if (design->parsed()) {
      const auto s = subspace_from_json(read_json(subspace_path));
      const ReducedDomain domain(domain_from(input_kind, s.dimension()), s);
      const Matrix d = domain.is_zonotope() ? zonotope_design(domain, spacing) : tensor_design(domain, points_per_dim);
      write_design_csv(std::filesystem::path(out_dir) / "design.csv", d);
      if (domain.vertices()) write_design_csv(std::filesystem::path(out_dir) / "vertices.csv", *domain.vertices());
      std::printf("wrote %ld design points\n", static_cast<long>(d.rows()));
    } else if (fit->parsed()) {
      const auto cfg = load_config(config_path, out_dir);
      const auto s = subspace_from_json(read_json(subspace_path));
      const auto set = read_samples_csv(samples_path);
      auto model = make_model(cfg.model);
      const InputDomain input = model->input_domain();
      if (input.m != s.dimension()) throw ConfigError("subspace dimension does not match the configured model");
      Matrix d;
      Vector values;
      if (!training_path.empty()) {
        std::tie(d, values) = read_training_csv(training_path);
      } else {
        if (design_path.empty()) throw ConfigError("fit needs --design or --training");
        d = read_design_csv(design_path);
        const ReducedDomain domain(input, s);
        Matrix lifted(input.m, d.rows());
        for (Eigen::Index k = 0; k < d.rows(); ++k) lifted.col(k) = lift_point(domain, d.row(k).transpose());
        values = kernels::evaluate_values_parallel(*model, lifted);
        write_training_csv(cfg.output_dir / "training.csv", d, values);
      }
      KrigingFitOptions options;
      options.poincare_constant = cfg.poincare_constant;
      options.amplitude = kernel_amplitude_from_string(cfg.kernel_amplitude);
      const auto km = fit_kriging(d, values, s.eigenvalues(), s.active_dimension(), biased_variance(set.values), input,
                                  options);
      write_json(cfg.output_dir / "model.json", model_to_json(km));
      std::printf("alpha %.6g  eta2 %.6g\n", km.hyperparameters().alpha, km.hyperparameters().eta2);
    } else if (predict->parsed()) {
      const auto km = model_from_json(read_json(model_path));
      Matrix pts = read_csv(points_path).rows;
      if (pts.cols() != km.active_dimension()) {
        if (subspace_path.empty()) throw ConfigError("full-space points need --subspace");
        const auto s = subspace_from_json(read_json(subspace_path));
        if (pts.cols() != s.dimension()) throw ConfigError("points have neither n nor m columns");
        pts = pts * s.active_basis();
      }
      Matrix rows(pts.rows(), pts.cols() + 2);
      for (Eigen::Index j = 0; j < pts.rows(); ++j) {
        const auto p = km.predict(pts.row(j).transpose());
        rows.row(j).head(pts.cols()) = pts.row(j);
        rows(j, pts.cols()) = p.mean;
        rows(j, pts.cols() + 1) = p.variance;
      }
      std::vector<std::string> header;
      for (Eigen::Index i = 1; i <= pts.cols(); ++i) header.push_back("y_" + std::to_string(i));
      header.push_back("mean");
      header.push_back("variance");
      write_csv(std::filesystem::path(out_dir) / "predictions.csv", header, rows);
    } else if (pipeline->parsed()) {
      const auto cfg = load_config(config_path, out_dir);
      const auto r = run_pipeline(cfg);
      write_pipeline_outputs(cfg.output_dir, r);
      print_eigenvalues(r.subspace);
      print_report("active subspace", r.report);
      for (const auto& msg : r.notices) std::fprintf(stderr, "notice: %s\n", msg.c_str());
    } else if (compare->parsed()) {
      const auto cfg = load_config(config_path, out_dir);
      auto model = make_model(cfg.model);
      const auto r = run_comparison(cfg, model);
      write_pipeline_outputs(cfg.output_dir / "active_subspace", r.subspace_arm);
      print_report("active subspace", r.subspace_arm.report);
      json summary = {{"active_subspace", report_to_json(r.subspace_arm.report)}};
      if (r.local_sensitivity) {
        write_error_outputs(cfg.output_dir / "local_sensitivity", r.local_sensitivity->report);
        json j = report_to_json(r.local_sensitivity->report);
        std::vector<Eigen::Index> one_based;
        for (auto c : r.local_sensitivity->coordinates) one_based.push_back(c + 1);
        j["coordinates"] = one_based;
        j["notices"] = r.local_sensitivity->notices;
        write_json(cfg.output_dir / "local_sensitivity" / "report.json", j);
        summary["local_sensitivity"] = j;
        print_report("local sensitivity", r.local_sensitivity->report);
      }
      if (r.full_space) {
        write_error_outputs(cfg.output_dir / "full_space", r.full_space->report);
        json j = report_to_json(r.full_space->report);
        j["notices"] = r.full_space->notices;
        write_json(cfg.output_dir / "full_space" / "report.json", j);
        write_error_outputs(cfg.output_dir / "active_subspace_fresh", *r.subspace_on_fresh);
        summary["full_space"] = j;
        summary["active_subspace_fresh"] = report_to_json(*r.subspace_on_fresh);
        print_report("subspace (fresh)", *r.subspace_on_fresh);
        print_report("full space", r.full_space->report);
        for (const auto& msg : r.full_space->notices) std::fprintf(stderr, "notice: %s\n", msg.c_str());
      }
      write_json(cfg.output_dir / "comparison.json", summary);
    } else if (perturb->parsed()) {
      const auto cfg = load_config(config_path, out_dir);
      const auto rows = run_perturbation_study(cfg, make_model(cfg.model));
      Matrix table(static_cast<Eigen::Index>(rows.size()), 5);
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        table.row(static_cast<Eigen::Index>(i)) << r.epsilon, r.distance, r.empirical_mse, r.bound,
            r.mean_relative_error;
        std::printf("eps %-6g  distance %.4e  mse %.4e  bound %.4e\n", r.epsilon, r.distance, r.empirical_mse,
                    r.bound);
      }
      write_csv(cfg.output_dir / "perturbation.csv",
                {"epsilon", "distance", "empirical_mse", "bound", "mean_relative_error"}, table);
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kExitNumerical;
  } catch (const DegenerateInput& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kExitNumerical;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::filesystem::filesystem_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  }
  return 0;
}
