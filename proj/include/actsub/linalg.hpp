#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace actsub {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Flip the sign of each column so its largest-magnitude entry is positive.
/// Ties go to the lowest row index.
void normalize_column_signs(Matrix& columns);

/// Deterministic 64-bit mixing of a base seed and a stream index (splitmix64).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

inline std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

inline Vector from_std(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace actsub
