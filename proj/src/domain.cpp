#include "actsub/domain.hpp"

#include "actsub/error.hpp"
#include "actsub/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

namespace actsub {

std::string to_string(InputKind kind) {
  return kind == InputKind::gaussian_standard ? "gaussian" : "uniform";
}

InputKind input_kind_from_string(const std::string& name) {
  if (name == "gaussian" || name == "gaussian_standard") return InputKind::gaussian_standard;
  if (name == "uniform" || name == "uniform_hypercube") return InputKind::uniform_hypercube;
  throw InvalidInput("unknown input domain '" + name + "'");
}

double default_poincare_constant(const InputDomain& domain) {
  if (domain.kind == InputKind::gaussian_standard) return 1.0;
  return 2.0 * std::sqrt(static_cast<double>(domain.m)) / std::numbers::pi;
}

Matrix zonotope_vertices(const Matrix& active_basis) {
  const auto m = active_basis.rows();
  const auto n = active_basis.cols();
  if (n < 1) throw InvalidInput("zonotope_vertices: empty basis");
  if (n >= 3) throw Unsupported("zonotope vertex enumeration supports n = 1 or 2 only");

  if (n == 1) {
    const double r = active_basis.col(0).cwiseAbs().sum();
    Matrix v(2, 1);
    v << -r, r;
    return v;
  }

  // Generators folded into the upper half plane, parallel ones merged, sorted by angle.
  struct Generator {
    double angle;
    Eigen::Vector2d g;
  };
  std::vector<Generator> gens;
  for (Eigen::Index i = 0; i < m; ++i) {
    Eigen::Vector2d g = active_basis.row(i).transpose();
    if (g.norm() < 1e-12) continue;
    if (g.y() < 0.0 || (g.y() == 0.0 && g.x() < 0.0)) g = -g;
    double angle = std::atan2(g.y(), g.x());
    if (angle >= std::numbers::pi) angle -= std::numbers::pi;
    gens.push_back({angle, g});
  }
  if (gens.empty()) throw DegenerateInput("zonotope_vertices: every generator is zero");
  std::stable_sort(gens.begin(), gens.end(),
                   [](const Generator& a, const Generator& b) { return a.angle < b.angle; });

  std::vector<Eigen::Vector2d> merged;
  for (const auto& gen : gens) {
    if (!merged.empty()) {
      const Eigen::Vector2d& last = merged.back();
      const double cross = last.x() * gen.g.y() - last.y() * gen.g.x();
      if (std::abs(cross) <= 1e-12 * last.norm() * gen.g.norm()) {
        merged.back() += gen.g;
        continue;
      }
    }
    merged.push_back(gen.g);
  }
  // The first and last directions can also be parallel (angles near 0 and near pi).
  if (merged.size() > 1) {
    const Eigen::Vector2d& first = merged.front();
    const Eigen::Vector2d& last = merged.back();
    const double cross = first.x() * last.y() - first.y() * last.x();
    if (std::abs(cross) <= 1e-12 * first.norm() * last.norm()) {
      merged.front() -= last;
      merged.pop_back();
    }
  }

  const auto k = static_cast<Eigen::Index>(merged.size());
  Eigen::Vector2d p = Eigen::Vector2d::Zero();
  for (const auto& g : merged) p -= g;
  Matrix v(2 * k, 2);
  for (Eigen::Index i = 0; i < k; ++i) {
    v.row(i) = p.transpose();
    p += 2.0 * merged[static_cast<std::size_t>(i)];
  }
  for (Eigen::Index i = 0; i < k; ++i) {
    v.row(k + i) = p.transpose();
    p -= 2.0 * merged[static_cast<std::size_t>(i)];
  }
  return v;
}

bool polytope_contains(const Matrix& vertices, const Vector& y, double tolerance) {
  if (vertices.cols() != y.size()) throw InvalidInput("polytope_contains: dimension mismatch");
  if (y.size() == 1) {
    const double lo = vertices.col(0).minCoeff();
    const double hi = vertices.col(0).maxCoeff();
    const double slack = tolerance * std::max(1.0, std::abs(hi));
    return y(0) >= lo - slack && y(0) <= hi + slack;
  }
  if (y.size() != 2) throw Unsupported("polytope_contains: n = 1 or 2 only");
  const auto k = vertices.rows();
  const double scale = std::max(1.0, vertices.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < k; ++i) {
    const Eigen::Vector2d a = vertices.row(i).transpose();
    const Eigen::Vector2d b = vertices.row((i + 1) % k).transpose();
    const Eigen::Vector2d e = b - a;
    const Eigen::Vector2d r = y.head<2>() - a;
    const double cross = e.x() * r.y() - e.y() * r.x();
    if (cross < -tolerance * scale * std::max(1.0, e.norm())) return false;
  }
  return true;
}

ReducedDomain::ReducedDomain(InputDomain input, ActiveSubspace subspace)
    : input_(input), subspace_(std::move(subspace)) {
  if (input_.m != subspace_.dimension())
    throw InvalidInput("reduced domain: input dimension does not match the subspace");
  if (is_zonotope() && subspace_.active_dimension() <= 2)
    vertices_ = zonotope_vertices(subspace_.active_basis());
}

bool ReducedDomain::contains(const Vector& y, double tolerance) const {
  if (y.size() != active_dimension()) return false;
  if (!is_zonotope()) return y.allFinite();
  if (vertices_) return polytope_contains(*vertices_, y, tolerance);
  try {
    lift_point(*this, y);
    return true;
  } catch (const InvalidInput&) {
    return false;
  }
}

Matrix tensor_design(const ReducedDomain& domain, int points_per_dim) {
  if (domain.is_zonotope())
    throw Unsupported("tensor_design: zonotope domains use zonotope_design");
  if (points_per_dim < 2) throw InvalidInput("tensor_design: need at least 2 points per dimension");
  const auto n = domain.active_dimension();
  const int k = points_per_dim;
  std::vector<double> axis(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) axis[static_cast<std::size_t>(i)] = -3.0 + 6.0 * i / (k - 1);

  Eigen::Index total = 1;
  for (Eigen::Index d = 0; d < n; ++d) total *= k;
  Matrix design(total, n);
  for (Eigen::Index row = 0; row < total; ++row) {
    Eigen::Index rem = row;
    for (Eigen::Index d = n - 1; d >= 0; --d) {
      design(row, d) = axis[static_cast<std::size_t>(rem % k)];
      rem /= k;
    }
  }
  return design;
}

Matrix zonotope_design(const ReducedDomain& domain, double spacing) {
  if (!domain.is_zonotope()) throw Unsupported("zonotope_design: domain is not a zonotope");
  if (!(spacing > 0.0)) throw InvalidInput("zonotope_design: spacing must be positive");
  if (!domain.vertices()) throw Unsupported("zonotope_design: n = 1 or 2 only");
  const Matrix& verts = *domain.vertices();
  const auto n = verts.cols();

  std::vector<Vector> points;
  const auto axis_range = [&](Eigen::Index d) {
    const auto lo = static_cast<long>(std::ceil(verts.col(d).minCoeff() / spacing - 1e-9));
    const auto hi = static_cast<long>(std::floor(verts.col(d).maxCoeff() / spacing + 1e-9));
    return std::pair{lo, hi};
  };
  const auto [lo0, hi0] = axis_range(0);
  if (n == 1) {
    for (long i = lo0; i <= hi0; ++i) {
      Vector y(1);
      y << i * spacing;
      if (polytope_contains(verts, y)) points.push_back(y);
    }
  } else {
    const auto [lo1, hi1] = axis_range(1);
    for (long i = lo0; i <= hi0; ++i) {
      for (long j = lo1; j <= hi1; ++j) {
        Vector y(2);
        y << i * spacing, j * spacing;
        if (polytope_contains(verts, y)) points.push_back(y);
      }
    }
  }
  const double scale = std::max(1.0, verts.cwiseAbs().maxCoeff());
  for (Eigen::Index r = 0; r < verts.rows(); ++r) {
    const Vector v = verts.row(r).transpose();
    const bool present = std::any_of(points.begin(), points.end(), [&](const Vector& p) {
      return (p - v).cwiseAbs().maxCoeff() <= 1e-12 * scale;
    });
    if (!present) points.push_back(v);
  }
  Matrix design(static_cast<Eigen::Index>(points.size()), n);
  for (std::size_t i = 0; i < points.size(); ++i)
    design.row(static_cast<Eigen::Index>(i)) = points[i].transpose();
  return design;
}

Vector lift_point(const ReducedDomain& domain, const Vector& y) {
  const auto n = domain.active_dimension();
  if (y.size() != n) throw InvalidInput("lift_point: y has wrong dimension");
  if (!y.allFinite()) throw InvalidInput("lift_point: non-finite y");
  const Matrix w1 = domain.subspace().active_basis();
  if (!domain.is_zonotope()) return w1 * y;

  // x = -1 + t + p,  x = 1 - t - q,  W1^T x = y,  maximize the margin t.
  const auto m = w1.rows();
  const Eigen::Index vars = 2 * m + 1;
  Matrix a = Matrix::Zero(m + n, vars);
  Vector b(m + n);
  for (Eigen::Index i = 0; i < m; ++i) {
    a(i, i) = 1.0;
    a(i, m + i) = 1.0;
    a(i, 2 * m) = 2.0;
    b(i) = 2.0;
  }
  const Vector col_sums = w1.colwise().sum().transpose();
  for (Eigen::Index k = 0; k < n; ++k) {
    a.row(m + k).head(m) = w1.col(k).transpose();
    a(m + k, 2 * m) = col_sums(k);
    b(m + k) = y(k) + col_sums(k);
  }
  Vector c = Vector::Zero(vars);
  c(2 * m) = -1.0;

  const auto lp = solve_standard_form_lp(a, b, c);
  if (!lp) throw InvalidInput("lift_point: y lies outside the zonotope");
  const double t = lp->solution(2 * m);
  Vector x = (Vector::Constant(m, -1.0 + t) + lp->solution.head(m)).cwiseMax(-1.0).cwiseMin(1.0);
  // One projection step removes the simplex round-off in W1^T x = y when there is room.
  if (t > 1e-9) {
    x += w1 * (y - w1.transpose() * x);
    x = x.cwiseMax(-1.0).cwiseMin(1.0);
  }
  if ((w1.transpose() * x - y).cwiseAbs().maxCoeff() > 1e-8)
    throw InvalidInput("lift_point: y lies outside the zonotope");
  return x;
}

Matrix sample_conditional_z(const ReducedDomain& domain, const Vector& y, long count,
                            std::uint64_t seed, const HitAndRunSettings& settings) {
  if (count < 1) throw InvalidInput("sample_conditional_z: count must be positive");
  const auto& sub = domain.subspace();
  const auto m = sub.dimension();
  const auto k = m - sub.active_dimension();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix draws(count, k);

  if (!domain.is_zonotope()) {
    if (y.size() != sub.active_dimension()) throw InvalidInput("sample_conditional_z: bad y");
    for (long r = 0; r < count; ++r)
      for (Eigen::Index j = 0; j < k; ++j) draws(r, j) = normal(rng);
    return draws;
  }

  const Matrix w1 = sub.active_basis();
  const Matrix w2 = sub.inactive_basis();
  const Vector center = w1 * y;
  Vector x = lift_point(domain, y);
  Vector z = w2.transpose() * x;
  x = center + w2 * z;

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const long burn_in = settings.burn_in_per_dim * k;
  const long total = burn_in + count * settings.thinning;
  Vector d(k);
  long stored = 0;
  for (long step = 1; step <= total; ++step) {
    for (Eigen::Index j = 0; j < k; ++j) d(j) = normal(rng);
    d.normalize();
    const Vector e = w2 * d;
    double t_lo = -std::numeric_limits<double>::infinity();
    double t_hi = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < m; ++i) {
      if (std::abs(e(i)) < 1e-14) continue;
      double a = (-1.0 - x(i)) / e(i);
      double b = (1.0 - x(i)) / e(i);
      if (a > b) std::swap(a, b);
      t_lo = std::max(t_lo, a);
      t_hi = std::min(t_hi, b);
    }
    if (std::isfinite(t_lo) && std::isfinite(t_hi) && t_hi > t_lo) {
      const double shrink = 1e-12 * (t_hi - t_lo);
      const double t = (t_lo + shrink) + unit(rng) * ((t_hi - shrink) - (t_lo + shrink));
      z += t * d;
      x += t * e;
    }
    if (step % 64 == 0) x = center + w2 * z;
    if (step > burn_in && (step - burn_in) % settings.thinning == 0 && stored < count) {
      draws.row(stored++) = z.transpose();
    }
  }
  return draws;
}

double effective_sample_size(const Vector& chain) {
  const auto n = chain.size();
  if (n < 2) return static_cast<double>(n);
  const Vector centered = chain.array() - chain.mean();
  const double var = centered.squaredNorm() / static_cast<double>(n);
  if (var == 0.0) return static_cast<double>(n);
  double sum = 0.0;
  for (Eigen::Index lag = 1; lag < n; ++lag) {
    const double rho =
        centered.head(n - lag).dot(centered.tail(n - lag)) / (static_cast<double>(n) * var);
    if (rho <= 0.0) break;
    sum += rho;
  }
  return static_cast<double>(n) / (1.0 + 2.0 * sum);
}

}  // namespace actsub
