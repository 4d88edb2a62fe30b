#include "actsub/simplex.hpp"

#include "actsub/error.hpp"

#include <limits>
#include <vector>

namespace actsub {

namespace {

// Tableau with rows = constraints, last row = reduced costs, last column = rhs.
class Tableau {
 public:
  Tableau(Matrix table, std::vector<Eigen::Index> basis, double tol)
      : t_(std::move(table)), basis_(std::move(basis)), tol_(tol) {}

  Eigen::Index rows() const { return t_.rows() - 1; }

  // Runs Bland-rule pivots over columns [0, allowed). Returns false when unbounded.
  bool optimize(Eigen::Index allowed) {
    const Eigen::Index obj = rows();
    const Eigen::Index rhs = t_.cols() - 1;
    for (int iter = 0; iter < 50000; ++iter) {
      Eigen::Index enter = -1;
      for (Eigen::Index j = 0; j < allowed; ++j) {
        if (t_(obj, j) < -tol_) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return true;
      Eigen::Index leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < obj; ++i) {
        if (t_(i, enter) > tol_) {
          const double ratio = t_(i, rhs) / t_(i, enter);
          if (ratio < best - tol_ || (ratio <= best + tol_ && leave >= 0 && basis_[i] < basis_[leave])) {
            best = ratio;
            leave = i;
          }
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
    }
    throw NumericalError("simplex: iteration limit reached");
  }

  void pivot(Eigen::Index row, Eigen::Index col) {
    t_.row(row) /= t_(row, col);
    for (Eigen::Index i = 0; i < t_.rows(); ++i) {
      if (i != row && t_(i, col) != 0.0) t_.row(i) -= t_(i, col) * t_.row(row);
    }
    basis_[row] = col;
  }

  Matrix& table() { return t_; }
  std::vector<Eigen::Index>& basis() { return basis_; }

 private:
  Matrix t_;
  std::vector<Eigen::Index> basis_;
  double tol_;
};

}  // namespace

std::optional<LinearProgramResult> solve_standard_form_lp(const Matrix& a, const Vector& b,
                                                          const Vector& c, double tolerance) {
  const Eigen::Index rows = a.rows();
  const Eigen::Index vars = a.cols();
  if (b.size() != rows || c.size() != vars) throw InvalidInput("simplex: shape mismatch");

  // Phase 1: artificial variable per row, rhs made non-negative.
  Matrix table = Matrix::Zero(rows + 1, vars + rows + 1);
  std::vector<Eigen::Index> basis(static_cast<std::size_t>(rows));
  for (Eigen::Index i = 0; i < rows; ++i) {
    const double s = b(i) < 0.0 ? -1.0 : 1.0;
    table.row(i).head(vars) = s * a.row(i);
    table(i, vars + i) = 1.0;
    table(i, vars + rows) = s * b(i);
    basis[static_cast<std::size_t>(i)] = vars + i;
  }
  for (Eigen::Index i = 0; i < rows; ++i) table.row(rows) -= table.row(i);
  for (Eigen::Index i = 0; i < rows; ++i) table(rows, vars + i) = 0.0;

  Tableau tab(std::move(table), std::move(basis), tolerance);
  tab.optimize(vars + rows);
  const double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
  if (-tab.table()(rows, vars + rows) > 1e-7 * scale) return std::nullopt;

  // Drive remaining artificials out of the basis where possible.
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (tab.basis()[static_cast<std::size_t>(i)] >= vars) {
      for (Eigen::Index j = 0; j < vars; ++j) {
        if (std::abs(tab.table()(i, j)) > 1e-9) {
          tab.pivot(i, j);
          break;
        }
      }
    }
  }

  // Phase 2: original costs, artificial columns frozen out of the entering set.
  Matrix& t = tab.table();
  t.row(rows).setZero();
  t.row(rows).head(vars) = c.transpose();
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto bi = tab.basis()[static_cast<std::size_t>(i)];
    if (bi < vars && c(bi) != 0.0) t.row(rows) -= c(bi) * t.row(i);
  }
  if (!tab.optimize(vars)) throw NumericalError("simplex: objective unbounded below");

  LinearProgramResult out;
  out.solution = Vector::Zero(vars);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto bi = tab.basis()[static_cast<std::size_t>(i)];
    if (bi < vars) out.solution(bi) = std::max(0.0, t(i, vars + rows));
  }
  out.objective = c.dot(out.solution);
  return out;
}

}  // namespace actsub
