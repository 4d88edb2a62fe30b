#include "actsub/model.hpp"

#include "actsub/error.hpp"

#include <cmath>

namespace actsub {

RidgeModel::RidgeModel(Vector direction, RidgeProfile profile, InputKind kind)
    : direction_(std::move(direction)), profile_(profile), kind_(kind) {
  if (direction_.size() < 1 || !direction_.allFinite() || direction_.squaredNorm() == 0.0)
    throw InvalidInput("ridge direction must be a finite non-zero vector");
}

double RidgeModel::value(const Vector& x) const {
  const double s = direction_.dot(x);
  return profile_ == RidgeProfile::exp ? std::exp(s) : s;
}

ValueGradient RidgeModel::value_and_gradient(const Vector& x) const {
  const double s = direction_.dot(x);
  if (profile_ == RidgeProfile::exp) {
    const double v = std::exp(s);
    return {v, v * direction_};
  }
  return {s, direction_};
}

QuadraticFormModel::QuadraticFormModel(Matrix a, InputKind kind) : a_(std::move(a)), kind_(kind) {
  if (a_.rows() < 1 || a_.rows() != a_.cols()) throw InvalidInput("quadratic form needs a square matrix");
  if ((a_ - a_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, a_.cwiseAbs().maxCoeff()))
    throw InvalidInput("quadratic form matrix must be symmetric");
}

double QuadraticFormModel::value(const Vector& x) const { return x.dot(a_ * x); }

ValueGradient QuadraticFormModel::value_and_gradient(const Vector& x) const {
  const Vector ax = a_ * x;
  return {x.dot(ax), 2.0 * ax};
}

ModelPtr make_ridge(const Vector& direction, RidgeProfile profile, InputKind kind) {
  return std::make_shared<RidgeModel>(direction, profile, kind);
}

ModelPtr make_quadratic_form(const Matrix& a, InputKind kind) {
  return std::make_shared<QuadraticFormModel>(a, kind);
}

}  // namespace actsub
