#include "actsub/elliptic.hpp"

#include "actsub/error.hpp"
#include "actsub/kernels.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

namespace actsub {

namespace {

constexpr char kCacheMagic[8] = {'A', 'C', 'T', 'S', 'U', 'B', 'K', 'L'};
constexpr std::uint32_t kCacheVersion = 1;
constexpr double kLogCoefficientLimit = 50.0;

Vector trapezoid_weights_1d(int q) {
  const double h = 1.0 / (q - 1);
  Vector w = Vector::Constant(q, h);
  w(0) = w(q - 1) = 0.5 * h;
  return w;
}

template <typename T>
void write_raw(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
bool read_raw(std::ifstream& in, T& v) {
  return static_cast<bool>(in.read(reinterpret_cast<char*>(&v), sizeof(T)));
}

bool read_doubles(std::ifstream& in, double* data, Eigen::Index count) {
  return static_cast<bool>(
      in.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(count * sizeof(double))));
}

}  // namespace

KlDecomposition kl_decompose(int q, double beta, Eigen::Index m) {
  if (q < 2) throw InvalidInput("kl_decompose: q must be at least 2");
  if (static_cast<long>(q) * q > 4096)
    throw InvalidInput("kl_decompose: q^2 = " + std::to_string(q * q) + " exceeds the 4096-node limit");
  if (!(beta > 0.0)) throw InvalidInput("kl_decompose: beta must be positive");
  const Eigen::Index nodes = static_cast<Eigen::Index>(q) * q;
  if (m < 1 || m > nodes) throw InvalidInput("kl_decompose: truncation must lie in [1, q^2]");

  const double h = 1.0 / (q - 1);
  const Vector w1 = trapezoid_weights_1d(q);
  Matrix coords(nodes, 2);
  Vector weights(nodes);
  for (int j = 0; j < q; ++j) {
    for (int i = 0; i < q; ++i) {
      const Eigen::Index idx = static_cast<Eigen::Index>(j) * q + i;
      coords(idx, 0) = i * h;
      coords(idx, 1) = j * h;
      weights(idx) = w1(i) * w1(j);
    }
  }
  const Vector sqrt_w = weights.cwiseSqrt();
  const Matrix b = kernels::weighted_correlation_parallel(coords, sqrt_w, beta);

  Eigen::SelfAdjointEigenSolver<Matrix> eig(b);
  if (eig.info() != Eigen::Success) throw NumericalError("kl_decompose: eigensolver failed");

  KlDecomposition kl;
  kl.q = q;
  kl.beta = beta;
  kl.weights = weights;
  kl.eigenvalues.resize(m);
  kl.modes.resize(nodes, m);
  for (Eigen::Index k = 0; k < m; ++k) {
    const Eigen::Index src = nodes - 1 - k;
    kl.eigenvalues(k) = std::max(0.0, eig.eigenvalues()(src));
    kl.modes.col(k) = eig.eigenvectors().col(src).cwiseQuotient(sqrt_w);
  }
  normalize_column_signs(kl.modes);
  kl.scales = kl.eigenvalues.cwiseSqrt();
  return kl;
}

std::filesystem::path kl_cache_file(const std::filesystem::path& dir, int q, double beta,
                                    Eigen::Index m) {
  char name[96];
  std::snprintf(name, sizeof(name), "kl-q%d-m%ld-beta%.17g.bin", q, static_cast<long>(m), beta);
  return dir / name;
}

void save_kl_cache(const std::filesystem::path& file, const KlDecomposition& kl) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidInput("cannot write KL cache " + file.string());
  out.write(kCacheMagic, sizeof(kCacheMagic));
  write_raw(out, kCacheVersion);
  write_raw(out, static_cast<std::int32_t>(kl.q));
  write_raw(out, static_cast<std::int64_t>(kl.terms()));
  write_raw(out, kl.beta);
  out.write(reinterpret_cast<const char*>(kl.eigenvalues.data()),
            static_cast<std::streamsize>(kl.eigenvalues.size() * sizeof(double)));
  out.write(reinterpret_cast<const char*>(kl.modes.data()),
            static_cast<std::streamsize>(kl.modes.size() * sizeof(double)));
  out.write(reinterpret_cast<const char*>(kl.weights.data()),
            static_cast<std::streamsize>(kl.weights.size() * sizeof(double)));
}

std::optional<KlDecomposition> load_kl_cache(const std::filesystem::path& file, int q, double beta,
                                             Eigen::Index m) {
  std::ifstream in(file, std::ios::binary);
  if (!in) return std::nullopt;
  char magic[8];
  std::uint32_t version = 0;
  std::int32_t fq = 0;
  std::int64_t fm = 0;
  double fbeta = 0.0;
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kCacheMagic, sizeof(magic)) != 0)
    return std::nullopt;
  if (!read_raw(in, version) || version != kCacheVersion) return std::nullopt;
  if (!read_raw(in, fq) || !read_raw(in, fm) || !read_raw(in, fbeta)) return std::nullopt;
  if (fq != q || fm != m || fbeta != beta) return std::nullopt;

  const Eigen::Index nodes = static_cast<Eigen::Index>(q) * q;
  KlDecomposition kl;
  kl.q = q;
  kl.beta = beta;
  kl.eigenvalues.resize(m);
  kl.modes.resize(nodes, m);
  kl.weights.resize(nodes);
  if (!read_doubles(in, kl.eigenvalues.data(), m) || !read_doubles(in, kl.modes.data(), nodes * m) ||
      !read_doubles(in, kl.weights.data(), nodes))
    return std::nullopt;
  kl.scales = kl.eigenvalues.cwiseSqrt();
  return kl;
}

KlDecomposition kl_decompose_cached(const std::filesystem::path& dir, int q, double beta,
                                    Eigen::Index m) {
  if (dir.empty()) return kl_decompose(q, beta, m);
  const auto file = kl_cache_file(dir, q, beta, m);
  if (auto cached = load_kl_cache(file, q, beta, m)) return *std::move(cached);
  KlDecomposition kl = kl_decompose(q, beta, m);
  save_kl_cache(file, kl);
  return kl;
}

EllipticModel::EllipticModel(KlDecomposition kl, double log_offset)
    : kl_(std::move(kl)), log_offset_(log_offset) {
  const int q = kl_.q;
  if (q < 17) throw InvalidInput("elliptic model: grid size q must be at least 17");
  if (kl_.modes.rows() != static_cast<Eigen::Index>(q) * q || kl_.scales.size() != kl_.terms())
    throw InvalidInput("elliptic model: KL data do not match the grid");
  unknowns_ = static_cast<Eigen::Index>(q - 1) * (q - 2);

  const Eigen::Index cells = static_cast<Eigen::Index>(q - 1) * (q - 1);
  cell_modes_.resize(cells, kl_.terms());
  for (int cj = 0; cj < q - 1; ++cj) {
    for (int ci = 0; ci < q - 1; ++ci) {
      const Eigen::Index c = static_cast<Eigen::Index>(cj) * (q - 1) + ci;
      const Eigen::Index n00 = static_cast<Eigen::Index>(cj) * q + ci;
      cell_modes_.row(c) = 0.25 * (kl_.modes.row(n00) + kl_.modes.row(n00 + 1) +
                                   kl_.modes.row(n00 + q) + kl_.modes.row(n00 + q + 1));
    }
  }
  cell_modes_ = cell_modes_ * kl_.scales.asDiagonal();
}

Eigen::Index EllipticModel::unknown_index(int i, int j) const {
  const int q = kl_.q;
  if (i == 0 || j == 0 || j == q - 1) return -1;
  return static_cast<Eigen::Index>(j - 1) * (q - 1) + (i - 1);
}

Vector EllipticModel::cell_log_coefficients(const Vector& x) const {
  if (x.size() != dimension())
    throw InvalidInput("elliptic model: expected " + std::to_string(dimension()) + " inputs");
  if (!x.allFinite()) throw InvalidInput("elliptic model: non-finite input");
  Vector log_a = cell_modes_ * x;
  log_a.array() += log_offset_;
  const double peak = log_a.cwiseAbs().maxCoeff();
  if (peak > kLogCoefficientLimit)
    throw NumericalError("elliptic model: coefficient overflow, |log a| reaches " + std::to_string(peak) +
                         " for input with max |x_i| = " + std::to_string(x.cwiseAbs().maxCoeff()));
  return log_a;
}

DiscreteSystem EllipticModel::assemble_system(const Vector& x) const {
  const int q = kl_.q;
  const double h = 1.0 / (q - 1);
  DiscreteSystem sys;
  sys.cell_coefficients = cell_log_coefficients(x).array().exp();

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(unknowns_) * 5 * 2);
  const auto add_edge = [&](int ia, int ja, int ib, int jb, double k) {
    const auto a = unknown_index(ia, ja);
    const auto b = unknown_index(ib, jb);
    if (a >= 0) triplets.emplace_back(a, a, k);
    if (b >= 0) triplets.emplace_back(b, b, k);
    if (a >= 0 && b >= 0) {
      triplets.emplace_back(a, b, -k);
      triplets.emplace_back(b, a, -k);
    }
  };
  // Each cell hands half its coefficient to each of its four edges.
  for (int cj = 0; cj < q - 1; ++cj) {
    for (int ci = 0; ci < q - 1; ++ci) {
      const double k = 0.5 * sys.cell_coefficients(static_cast<Eigen::Index>(cj) * (q - 1) + ci);
      add_edge(ci, cj, ci + 1, cj, k);
      add_edge(ci, cj + 1, ci + 1, cj + 1, k);
      add_edge(ci, cj, ci, cj + 1, k);
      add_edge(ci + 1, cj, ci + 1, cj + 1, k);
    }
  }
  sys.stiffness.resize(unknowns_, unknowns_);
  sys.stiffness.setFromTriplets(triplets.begin(), triplets.end());

  sys.load.resize(unknowns_);
  sys.qoi_weights = Vector::Zero(unknowns_);
  for (int j = 1; j < q - 1; ++j) {
    for (int i = 1; i < q; ++i) {
      const auto u = unknown_index(i, j);
      const bool right = i == q - 1;
      sys.load(u) = right ? 0.5 * h * h : h * h;
      if (right) sys.qoi_weights(u) = h;
    }
  }
  return sys;
}

namespace {

using SparseCholesky = Eigen::SimplicialLLT<Eigen::SparseMatrix<double>>;

void factorize(SparseCholesky& chol, const DiscreteSystem& sys) {
  chol.compute(sys.stiffness);
  if (chol.info() != Eigen::Success) throw NumericalError("elliptic model: stiffness factorization failed");
}

}  // namespace

double EllipticModel::solve_qoi(const Vector& x) const {
  const DiscreteSystem sys = assemble_system(x);
  SparseCholesky chol;
  factorize(chol, sys);
  const Vector u = chol.solve(sys.load);
  solves_.fetch_add(1, std::memory_order_relaxed);
  if (chol.info() != Eigen::Success || !u.allFinite())
    throw NumericalError("elliptic model: forward solve failed");
  return sys.qoi_weights.dot(u);
}

Vector EllipticModel::solve_field(const Vector& x) const {
  const DiscreteSystem sys = assemble_system(x);
  SparseCholesky chol;
  factorize(chol, sys);
  const Vector u = chol.solve(sys.load);
  solves_.fetch_add(1, std::memory_order_relaxed);
  const int q = kl_.q;
  Vector field = Vector::Zero(static_cast<Eigen::Index>(q) * q);
  for (int j = 0; j < q; ++j)
    for (int i = 0; i < q; ++i)
      if (const auto k = unknown_index(i, j); k >= 0) field(static_cast<Eigen::Index>(j) * q + i) = u(k);
  return field;
}

ValueGradient EllipticModel::value_and_gradient(const Vector& x) const {
  const int q = kl_.q;
  const DiscreteSystem sys = assemble_system(x);
  SparseCholesky chol;
  factorize(chol, sys);
  const Vector u = chol.solve(sys.load);
  // K is symmetric, so the adjoint K^T y = M^T c reuses the factorization.
  const Vector y = chol.solve(sys.qoi_weights);
  solves_.fetch_add(2, std::memory_order_relaxed);
  if (!u.allFinite() || !y.allFinite()) throw NumericalError("elliptic model: solve failed");

  const auto nodal = [&](const Vector& v, int i, int j) {
    const auto k = unknown_index(i, j);
    return k >= 0 ? v(k) : 0.0;
  };
  // y^T (dK/da_c) u for every cell, times da_c/dlog a_c = a_c.
  const Eigen::Index cells = static_cast<Eigen::Index>(q - 1) * (q - 1);
  Vector cell_sens(cells);
  for (int cj = 0; cj < q - 1; ++cj) {
    for (int ci = 0; ci < q - 1; ++ci) {
      const double u00 = nodal(u, ci, cj), u10 = nodal(u, ci + 1, cj);
      const double u01 = nodal(u, ci, cj + 1), u11 = nodal(u, ci + 1, cj + 1);
      const double y00 = nodal(y, ci, cj), y10 = nodal(y, ci + 1, cj);
      const double y01 = nodal(y, ci, cj + 1), y11 = nodal(y, ci + 1, cj + 1);
      const double edges = (y00 - y10) * (u00 - u10) + (y01 - y11) * (u01 - u11) +
                           (y00 - y01) * (u00 - u01) + (y10 - y11) * (u10 - u11);
      const Eigen::Index c = static_cast<Eigen::Index>(cj) * (q - 1) + ci;
      cell_sens(c) = 0.5 * edges * sys.cell_coefficients(c);
    }
  }
  ValueGradient out;
  out.value = sys.qoi_weights.dot(u);
  out.gradient = -(cell_modes_.transpose() * cell_sens);
  return out;
}

std::shared_ptr<EllipticModel> make_elliptic(int q, double beta, Eigen::Index m,
                                             const std::filesystem::path& cache_dir) {
  return std::make_shared<EllipticModel>(kl_decompose_cached(cache_dir, q, beta, m));
}

}  // namespace actsub
