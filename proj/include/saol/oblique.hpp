#ifndef SAOL_OBLIQUE_HPP
#define SAOL_OBLIQUE_HPP

#include <random>
#include <vector>

#include "saol/tensor.hpp"

namespace saol {

using Rng = std::mt19937_64;

// A point on Ob(m,p): an m x p matrix with unit-norm rows.
// The oblique manifold is a product of unit spheres, one per row.

// Draws entries i.i.d. standard normal and normalizes each row.
Matrix random_oblique(Eigen::Index m, Eigen::Index p, Rng& rng);

// Projects G onto the tangent space at omega: row j of the result is
// g_j - (g_j . w_j) w_j.
Matrix project_to_tangent(const Matrix& omega, const Matrix& g);

// Follows the great-circle geodesic from omega in tangent direction h for
// arc length t. Rows with numerically zero direction stay fixed.
Matrix geodesic_step(const Matrix& omega, const Matrix& h, double t);

// Checks the unit-row-norm invariant.
bool is_oblique(const Matrix& omega, double tol = 1e-10);

// Ordered list of oblique factor matrices; a single factor encodes the
// non-separable case. The composed operator is the Kronecker product of the
// factors and has unit-norm rows whenever every factor does.
class AnalysisOperator {
 public:
  AnalysisOperator() = default;
  explicit AnalysisOperator(std::vector<Matrix> factors);

  static AnalysisOperator random(const std::vector<std::pair<Eigen::Index, Eigen::Index>>& dims,
                                 Rng& rng);

  const std::vector<Matrix>& factors() const { return factors_; }
  std::vector<Matrix>& factors() { return factors_; }
  size_t num_factors() const { return factors_.size(); }

  Eigen::Index rows() const;  // m = prod m_i
  Eigen::Index cols() const;  // p = prod p_i
  std::vector<Eigen::Index> row_mode_sizes() const;
  std::vector<Eigen::Index> col_mode_sizes() const;

  // The composed operator iota(factors).
  Matrix compose() const;

  // Applies the operator to a vectorized sample via per-mode products.
  Vector apply(const Vector& s) const;

 private:
  std::vector<Matrix> factors_;
};

// Per-factor tangent matrices.
struct TangentDirection {
  std::vector<Matrix> parts;

  double squared_norm() const;  // sum of per-factor squared Frobenius norms
};

AnalysisOperator geodesic_step(const AnalysisOperator& op, const TangentDirection& h, double t);

}  // namespace saol

#endif
