#pragma once

#include "actsub/input_domain.hpp"
#include "actsub/linalg.hpp"

#include <atomic>
#include <memory>
#include <string>

namespace actsub {

struct ValueGradient {
  double value = 0.0;
  Vector gradient;
};

/// An evaluable f with gradient on an input domain. Implementations must be reentrant:
/// value/gradient may be called concurrently from several threads.
class ModelFunction {
 public:
  virtual ~ModelFunction() = default;

  virtual Eigen::Index dimension() const = 0;
  virtual InputDomain input_domain() const = 0;
  virtual std::string name() const = 0;

  virtual double value(const Vector& x) const = 0;
  virtual ValueGradient value_and_gradient(const Vector& x) const = 0;
  Vector gradient(const Vector& x) const { return value_and_gradient(x).gradient; }
};

using ModelPtr = std::shared_ptr<const ModelFunction>;

enum class RidgeProfile { identity, exp };

/// f(x) = h(a^T x).
class RidgeModel final : public ModelFunction {
 public:
  RidgeModel(Vector direction, RidgeProfile profile,
             InputKind kind = InputKind::gaussian_standard);

  Eigen::Index dimension() const override { return direction_.size(); }
  InputDomain input_domain() const override { return {kind_, direction_.size()}; }
  std::string name() const override { return "ridge"; }
  double value(const Vector& x) const override;
  ValueGradient value_and_gradient(const Vector& x) const override;

  const Vector& direction() const { return direction_; }
  RidgeProfile profile() const { return profile_; }

 private:
  Vector direction_;
  RidgeProfile profile_;
  InputKind kind_;
};

/// f(x) = x^T A x with A symmetric.
class QuadraticFormModel final : public ModelFunction {
 public:
  explicit QuadraticFormModel(Matrix a, InputKind kind = InputKind::gaussian_standard);

  Eigen::Index dimension() const override { return a_.rows(); }
  InputDomain input_domain() const override { return {kind_, a_.rows()}; }
  std::string name() const override { return "quadratic"; }
  double value(const Vector& x) const override;
  ValueGradient value_and_gradient(const Vector& x) const override;

  const Matrix& matrix() const { return a_; }

 private:
  Matrix a_;
  InputKind kind_;
};

ModelPtr make_ridge(const Vector& direction, RidgeProfile profile,
                    InputKind kind = InputKind::gaussian_standard);
ModelPtr make_quadratic_form(const Matrix& a, InputKind kind = InputKind::gaussian_standard);

/// Forwards to another model and counts calls; the counters are the budget ledger.
class CountingModel final : public ModelFunction {
 public:
  explicit CountingModel(ModelPtr inner) : inner_(std::move(inner)) {}

  Eigen::Index dimension() const override { return inner_->dimension(); }
  InputDomain input_domain() const override { return inner_->input_domain(); }
  std::string name() const override { return inner_->name(); }

  double value(const Vector& x) const override {
    value_calls_.fetch_add(1, std::memory_order_relaxed);
    return inner_->value(x);
  }
  ValueGradient value_and_gradient(const Vector& x) const override {
    gradient_calls_.fetch_add(1, std::memory_order_relaxed);
    return inner_->value_and_gradient(x);
  }

  long value_calls() const { return value_calls_.load(); }
  long gradient_calls() const { return gradient_calls_.load(); }
  void reset() {
    value_calls_ = 0;
    gradient_calls_ = 0;
  }

 private:
  ModelPtr inner_;
  mutable std::atomic<long> value_calls_{0};
  mutable std::atomic<long> gradient_calls_{0};
};

}  // namespace actsub
