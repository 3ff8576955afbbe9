#include "saol/evaluation.hpp"

#include <cmath>
#include <limits>
#include <numeric>

namespace saol {

Matrix confusion_matrix(const AnalysisOperator& learned, const AnalysisOperator& gt) {
  Matrix a = learned.compose();
  Matrix b = gt.compose();
  if (a.rows() != b.rows())
    throw std::invalid_argument("confusion_matrix: row count mismatch");
  if (a.cols() != b.cols())
    throw std::invalid_argument("confusion_matrix: column count mismatch");
  Matrix c(a.rows(), a.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < b.rows(); ++j)
      c(i, j) = 1.0 - std::abs(a.row(i).dot(b.row(j)));
  return c;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Shortest-augmenting-path assignment on the submatrix of `cost` given by the
// surviving row and column index lists. Returns minimal total cost.
double solve_assignment(const Matrix& cost, const std::vector<Eigen::Index>& rows,
                        const std::vector<Eigen::Index>& cols,
                        std::vector<Eigen::Index>* match_out = nullptr) {
  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  if (n == 0) return 0.0;
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<Eigen::Index> p(n + 1, 0), way(n + 1, 0);
  for (Eigen::Index i = 1; i <= n; ++i) {
    p[0] = i;
    Eigen::Index j0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      Eigen::Index i0 = p[j0], j1 = 0;
      double delta = kInf;
      for (Eigen::Index j = 1; j <= n; ++j) {
        if (used[j]) continue;
        double cur = cost(rows[i0 - 1], cols[j - 1]) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (Eigen::Index j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      Eigen::Index j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<Eigen::Index> match(n);  // match[row position] = column position
  for (Eigen::Index j = 1; j <= n; ++j)
    if (p[j] != 0) match[p[j] - 1] = j - 1;
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) total += cost(rows[i], cols[match[i]]);
  if (match_out) *match_out = std::move(match);
  return total;
}

}  // namespace

Assignment hungarian_min_assignment(const Matrix& cost) {
  if (cost.rows() != cost.cols())
    throw std::invalid_argument("hungarian_min_assignment: matrix must be square");
  const Eigen::Index n = cost.rows();
  std::vector<Eigen::Index> rows(n), cols(n);
  std::iota(rows.begin(), rows.end(), 0);
  std::iota(cols.begin(), cols.end(), 0);
  double best = solve_assignment(cost, rows, cols);

  // Lexicographic tie-break: fix rows in order to the smallest column that
  // still admits a completion with optimal total cost.
  const double tol = 1e-9 * std::max(1.0, std::abs(best));
  Assignment out;
  out.permutation.resize(n);
  std::vector<Eigen::Index> rem_rows(rows.begin() + 1, rows.end());
  double remaining = best;
  std::vector<Eigen::Index> rem_cols = cols;
  for (Eigen::Index i = 0; i < n; ++i) {
    bool fixed = false;
    for (size_t jc = 0; jc < rem_cols.size() && !fixed; ++jc) {
      Eigen::Index j = rem_cols[jc];
      std::vector<Eigen::Index> next_cols = rem_cols;
      next_cols.erase(next_cols.begin() + static_cast<std::ptrdiff_t>(jc));
      double sub = solve_assignment(cost, rem_rows, next_cols);
      if (std::abs(cost(i, j) + sub - remaining) <= tol) {
        out.permutation[i] = j;
        remaining -= cost(i, j);
        rem_cols = std::move(next_cols);
        fixed = true;
      }
    }
    if (!fixed) throw std::logic_error("hungarian_min_assignment: refinement failed");
    if (!rem_rows.empty()) rem_rows.erase(rem_rows.begin());
  }
  out.cost = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) out.cost += cost(i, out.permutation[i]);
  return out;
}

double recovery_error(const AnalysisOperator& learned, const AnalysisOperator& gt) {
  return hungarian_min_assignment(confusion_matrix(learned, gt)).cost;
}

BoundResult complexity_bound(const BoundInputs& b) {
  if (b.factor_dims.empty()) throw std::invalid_argument("complexity_bound: no factor dims");
  if (b.lipschitz < 0) throw std::invalid_argument("complexity_bound: negative lambda");
  if (b.samples < 1) throw std::invalid_argument("complexity_bound: N must be >= 1");
  if (b.delta <= 0 || b.delta >= 1) throw std::invalid_argument("complexity_bound: delta in (0,1)");

  double m = 1.0, p = 1.0, c_sep = 0.0;
  for (auto [mi, pi] : b.factor_dims) {
    m *= static_cast<double>(mi);
    p *= static_cast<double>(pi);
    c_sep += static_cast<double>(mi) * std::sqrt(static_cast<double>(pi));
  }
  BoundResult out;
  out.c_constant = b.separable ? c_sep : m * std::sqrt(p);
  out.eta = std::sqrt(2.0 * M_PI) * b.lipschitz * out.c_constant / std::sqrt(b.samples) +
            3.0 * std::sqrt(2.0 * b.lipschitz * b.lipschitz * m * std::log(2.0 / b.delta) /
                            b.samples);
  return out;
}

double sparsity_slope_bound(double nu) {
  if (nu <= 0) throw std::invalid_argument("sparsity_slope_bound: nu must be positive");
  return std::sqrt(nu);
}

}  // namespace saol
