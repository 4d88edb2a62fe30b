#pragma once

#include "actsub/model.hpp"

#include <Eigen/SparseCore>

#include <atomic>
#include <filesystem>
#include <optional>

namespace actsub {

/// Truncated Karhunen-Loeve basis of the field with correlation exp(-||s - t||_1 / beta) on a
/// q x q node grid over [0, 1]^2. Node (i, j) sits at (i h, j h) with index j q + i.
struct KlDecomposition {
  int q = 0;
  double beta = 0.0;
  Vector eigenvalues;  // operator eigenvalues mu_i, descending
  Vector scales;       // gamma_i = sqrt(mu_i)
  Matrix modes;        // q^2 x m nodal values, orthonormal in the weighted inner product
  Vector weights;      // trapezoidal node weights

  Eigen::Index terms() const { return modes.cols(); }
};

/// Weighted eigenproblem of the nodal correlation matrix; the m leading pairs.
/// Rejects q^2 > 4096.
KlDecomposition kl_decompose(int q, double beta, Eigen::Index m);

/// Binary sidecar keyed by (q, beta, m). Returns nullopt if the file is absent, stale, or
/// of a different format version.
std::optional<KlDecomposition> load_kl_cache(const std::filesystem::path& file, int q, double beta,
                                             Eigen::Index m);
void save_kl_cache(const std::filesystem::path& file, const KlDecomposition& kl);
std::filesystem::path kl_cache_file(const std::filesystem::path& dir, int q, double beta,
                                    Eigen::Index m);

/// kl_decompose through the cache directory (no caching when dir is empty).
KlDecomposition kl_decompose_cached(const std::filesystem::path& dir, int q, double beta,
                                    Eigen::Index m);

/// K u = f for the current coefficient field. Unknowns are the nodes off the Dirichlet
/// boundary (left, top, bottom), ordered row by row.
struct DiscreteSystem {
  Eigen::SparseMatrix<double> stiffness;
  Vector load;
  Vector qoi_weights;  // c^T M: trapezoid weights of the right edge average
  Vector cell_coefficients;
};

/// -div(a grad u) = 1 on the unit square, log a = offset + sum_i x_i gamma_i phi_i, with
/// u = 0 on left/top/bottom and zero flux on the right. The quantity of interest is the
/// mean of u over the right edge. Five-point scheme with cell-centred coefficients.
class EllipticModel final : public ModelFunction {
 public:
  explicit EllipticModel(KlDecomposition kl, double log_offset = 0.0);

  Eigen::Index dimension() const override { return kl_.terms(); }
  InputDomain input_domain() const override { return {InputKind::gaussian_standard, dimension()}; }
  std::string name() const override { return "elliptic"; }

  double value(const Vector& x) const override { return solve_qoi(x); }
  ValueGradient value_and_gradient(const Vector& x) const override;

  DiscreteSystem assemble_system(const Vector& x) const;
  double solve_qoi(const Vector& x) const;
  Vector gradient_adjoint(const Vector& x) const { return value_and_gradient(x).gradient; }

  /// Nodal solution on the full q x q grid (Dirichlet nodes hold zero).
  Vector solve_field(const Vector& x) const;

  const KlDecomposition& kl() const { return kl_; }
  int grid_size() const { return kl_.q; }
  Eigen::Index unknowns() const { return unknowns_; }
  double log_offset() const { return log_offset_; }

  /// Number of sparse triangular solves performed so far.
  long solve_count() const { return solves_.load(); }

 private:
  Vector cell_log_coefficients(const Vector& x) const;
  Eigen::Index unknown_index(int i, int j) const;  // -1 on the Dirichlet boundary

  KlDecomposition kl_;
  double log_offset_;
  Eigen::Index unknowns_;
  Matrix cell_modes_;  // cells x m, mode value at each cell centre scaled by gamma
  mutable std::atomic<long> solves_{0};
};

std::shared_ptr<EllipticModel> make_elliptic(int q, double beta, Eigen::Index m,
                                             const std::filesystem::path& cache_dir = {});

}  // namespace actsub
